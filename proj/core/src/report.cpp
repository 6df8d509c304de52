#include "kglab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace kglab {
namespace {

std::string format_count(std::uint64_t v) { return std::to_string(v); }
std::string format_flag(bool b) { return b ? "1" : "0"; }

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }
std::string format_linear(const std::optional<LogValue>& v) {
  return v ? format_number(v->value()) : std::string();
}
std::string format_log(const std::optional<LogValue>& v) {
  if (!v) return {};
  if (v->is_zero()) return "-inf";
  return format_number(v->log_magnitude);
}

std::string quote_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

std::uint64_t parse_count(std::string_view text, std::string_view spec) {
  std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v) || v < 1.0) {
    throw ValidationError("t-grid '" + std::string(spec) + "': bad round value '" + s + "'");
  }
  return static_cast<std::uint64_t>(std::floor(v));
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  while (true) {
    const auto pos = s.find(sep, begin);
    parts.push_back(s.substr(begin, pos == std::string_view::npos ? std::string_view::npos : pos - begin));
    if (pos == std::string_view::npos) break;
    begin = pos + 1;
  }
  return parts;
}

std::string arm_label(ArmIndex i) { return "arm " + std::to_string(i + 1); }

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return {};
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[512];
  const double ax = std::fabs(x);
  const auto fmt = (ax < 1e-4 || ax >= 1e15) ? std::chars_format::scientific : std::chars_format::fixed;
  const auto res = std::to_chars(buf, buf + sizeof buf, x, fmt);
  return std::string(buf, res.ptr);
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  auto append_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += quote_field(row[i]);
    }
    out += '\n';
  };
  append_row(table.header);
  for (const auto& row : table.rows) append_row(row);
  return out;
}

void emit_csv(const std::filesystem::path& path, const CsvTable& table) { write_file(path, to_csv(table)); }

CsvTable measures_table(const EstimateSeries& series, const std::vector<BoundSet>& bounds) {
  if (bounds.size() != series.checkpoint_rounds.size()) {
    throw ValidationError("measures table: one bound set per checkpoint required");
  }
  CsvTable table{kMeasuresColumns, {}};
  for (std::size_t c = 0; c < bounds.size(); ++c) {
    const auto& b = bounds[c];
    table.rows.push_back({format_count(series.checkpoint_rounds[c]), format_number(series.pe_hat[c]),
                          format_number(series.pe_stderr[c]), format_linear(b.pe_upper), format_linear(b.pe_lower),
                          format_number(series.sr_hat[c]), format_number(series.sr_stderr[c]),
                          format_linear(b.sr_upper), format_linear(b.sr_lower), format_number(series.cr_hat[c]),
                          format_number(series.cr_stderr[c]), format_optional(b.cr_upper),
                          format_number(b.confidence), format_flag(b.vacuous)});
  }
  return table;
}

CsvTable alpha_table(const EstimateSeries& series, const std::vector<BoundSet>& bounds) {
  if (bounds.size() != series.checkpoint_rounds.size()) {
    throw ValidationError("alpha table: one bound set per checkpoint required");
  }
  CsvTable table{kAlphaColumns, {}};
  for (std::size_t c = 0; c < bounds.size(); ++c) {
    const auto& b = bounds[c];
    for (ArmIndex i = 0; i < series.k; ++i) {
      table.rows.push_back({format_count(series.checkpoint_rounds[c]), format_count(i + 1),
                            format_number(series.alpha_at(c, i)), format_number(series.alpha_stderr_at(c, i)),
                            b.alpha ? format_number(b.alpha->lower[i]) : std::string(),
                            b.alpha ? format_number(b.alpha->upper[i]) : std::string(), format_flag(b.rho.valid)});
    }
  }
  return table;
}

CsvTable bounds_table(const std::vector<BoundSet>& bounds) {
  CsvTable table{kBoundsColumns, {}};
  for (const auto& b : bounds) {
    std::optional<double> per_t;
    if (b.cr_upper) per_t = *b.cr_upper / static_cast<double>(b.t);
    table.rows.push_back({format_count(b.t), format_flag(b.rho.valid), format_flag(b.vacuous), format_number(b.q),
                          format_number(b.confidence), format_linear(b.pe_upper), format_linear(b.pe_lower),
                          format_linear(b.sr_upper), format_linear(b.sr_lower), format_log(b.pe_upper),
                          format_log(b.pe_lower), format_log(b.sr_upper), format_log(b.sr_lower),
                          format_optional(b.cr_upper), format_optional(per_t)});
  }
  return table;
}

CsvTable bounds_arm_table(const std::vector<BoundSet>& bounds) {
  CsvTable table{kBoundsArmColumns, {}};
  for (const auto& b : bounds) {
    for (ArmIndex i = 0; i < b.rho.arms.size(); ++i) {
      const auto& r = b.rho.arms[i];
      table.rows.push_back({format_count(b.t), format_count(i + 1), format_number(r.lower), format_number(r.upper),
                            b.alpha ? format_number(b.alpha->lower[i]) : std::string(),
                            b.alpha ? format_number(b.alpha->upper[i]) : std::string(), format_flag(r.valid)});
    }
  }
  return table;
}

std::vector<std::uint64_t> parse_t_grid(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("t-grid '" + std::string(spec) + "': expected geometric:<start>:<stop>:<points> or list:a,b");
  }
  const auto kind = spec.substr(0, colon);
  const auto rest = spec.substr(colon + 1);
  std::vector<std::uint64_t> grid;
  if (kind == "geometric") {
    const auto parts = split(rest, ':');
    if (parts.size() != 3) throw ValidationError("t-grid '" + std::string(spec) + "': geometric needs 3 fields");
    grid = geometric_grid(parse_count(parts[0], spec), parse_count(parts[1], spec), parse_count(parts[2], spec));
  } else if (kind == "list") {
    for (auto part : split(rest, ',')) grid.push_back(parse_count(part, spec));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  } else {
    throw ValidationError("t-grid '" + std::string(spec) + "': unknown grid kind '" + std::string(kind) + "'");
  }
  return grid;
}

FigureKind parse_figure_kind(std::string_view name) {
  if (name == "sampling-rates") return FigureKind::kSamplingRates;
  if (name == "pe") return FigureKind::kPe;
  if (name == "sr") return FigureKind::kSr;
  if (name == "cr") return FigureKind::kCr;
  if (name == "bounds-only") return FigureKind::kBoundsOnly;
  throw ValidationError("unknown figure kind '" + std::string(name) +
                        "' (expected sampling-rates, pe, sr, cr or bounds-only)");
}

std::string_view figure_kind_name(FigureKind kind) {
  switch (kind) {
    case FigureKind::kSamplingRates: return "sampling-rates";
    case FigureKind::kPe: return "pe";
    case FigureKind::kSr: return "sr";
    case FigureKind::kCr: return "cr";
    case FigureKind::kBoundsOnly: return "bounds-only";
  }
  return "unknown";
}

std::vector<ArmIndex> default_figure_arms(const BanditInstance& inst) {
  std::vector<ArmIndex> others;
  for (ArmIndex i = 0; i < inst.k(); ++i) {
    if (i != inst.best()) others.push_back(i);
  }
  std::vector<ArmIndex> arms{others.front(), others[(others.size() - 1) / 2], inst.best()};
  arms.erase(std::unique(arms.begin(), arms.end()), arms.end());
  return arms;
}

FigureSpec make_figure(FigureKind kind, const BanditInstance& inst, const EstimateSeries* series,
                       const std::vector<BoundSet>& bounds, const std::vector<ArmIndex>& arms) {
  FigureSpec spec;
  spec.title = std::string(figure_kind_name(kind));

  auto bound_curve = [&](std::string name, std::string transform, auto&& value_of) {
    Curve curve{std::move(name), true, std::move(transform), {}};
    for (const auto& b : bounds) curve.points.push_back({b.t, value_of(b), b.rho.valid, b.vacuous});
    spec.curves.push_back(std::move(curve));
  };
  auto estimate_curve = [&](std::string name, std::string transform, auto&& value_of) {
    if (series == nullptr) return;
    Curve curve{std::move(name), false, std::move(transform), {}};
    for (std::size_t c = 0; c < series->checkpoint_rounds.size(); ++c) {
      curve.points.push_back({series->checkpoint_rounds[c], value_of(c), true, false});
    }
    spec.curves.push_back(std::move(curve));
  };
  auto rate_of = [](const std::optional<LogValue> BoundSet::*member) {
    return [member](const BoundSet& b) { return neg_log_rate(b.*member, b.t); };
  };

  switch (kind) {
    case FigureKind::kSamplingRates:
      spec.y_label = "sampling rate N_i,t / t";
      for (ArmIndex a : arms) {
        if (a >= inst.k()) throw ValidationError("figure: arm " + std::to_string(a + 1) + " out of range");
        estimate_curve("alpha_hat " + arm_label(a), "identity",
                       [&](std::size_t c) -> std::optional<double> { return series->alpha_at(c, a); });
        bound_curve("alpha_lower " + arm_label(a), "identity", [a](const BoundSet& b) -> std::optional<double> {
          return b.alpha ? std::optional<double>(b.alpha->lower[a]) : std::nullopt;
        });
        bound_curve("alpha_upper " + arm_label(a), "identity", [a](const BoundSet& b) -> std::optional<double> {
          return b.alpha ? std::optional<double>(b.alpha->upper[a]) : std::nullopt;
        });
      }
      break;
    case FigureKind::kPe:
      spec.y_label = "-log(e_t) / t";
      estimate_curve("pe_hat", "neg_log_over_t", [&](std::size_t c) {
        return neg_log_rate(series->pe_hat[c], series->checkpoint_rounds[c]);
      });
      bound_curve("pe_upper", "neg_log_over_t", rate_of(&BoundSet::pe_upper));
      bound_curve("pe_lower", "neg_log_over_t", rate_of(&BoundSet::pe_lower));
      break;
    case FigureKind::kSr:
      spec.y_label = "-log(r_t) / t";
      estimate_curve("sr_hat", "neg_log_over_t", [&](std::size_t c) {
        return neg_log_rate(series->sr_hat[c], series->checkpoint_rounds[c]);
      });
      bound_curve("sr_upper", "neg_log_over_t", rate_of(&BoundSet::sr_upper));
      bound_curve("sr_lower", "neg_log_over_t", rate_of(&BoundSet::sr_lower));
      break;
    case FigureKind::kCr: {
      spec.y_label = "R_t / t";
      estimate_curve("cr_hat", "over_t", [&](std::size_t c) -> std::optional<double> {
        return series->cr_hat[c] / static_cast<double>(series->checkpoint_rounds[c]);
      });
      bound_curve("cr_upper", "over_t", [](const BoundSet& b) -> std::optional<double> {
        if (!b.cr_upper) return std::nullopt;
        return *b.cr_upper / static_cast<double>(b.t);
      });
      const double limit = cr_rate_limit(inst.constants());
      Curve flat{"cr_rate_limit", true, "identity", {}};
      for (const auto& b : bounds) flat.points.push_back({b.t, limit, true, false});
      spec.curves.push_back(std::move(flat));
      break;
    }
    case FigureKind::kBoundsOnly:
      spec.y_label = "-log(bound) / t";
      bound_curve("pe_upper", "neg_log_over_t", rate_of(&BoundSet::pe_upper));
      bound_curve("pe_lower", "neg_log_over_t", rate_of(&BoundSet::pe_lower));
      bound_curve("sr_upper", "neg_log_over_t", rate_of(&BoundSet::sr_upper));
      bound_curve("sr_lower", "neg_log_over_t", rate_of(&BoundSet::sr_lower));
      break;
  }
  return spec;
}

CsvTable figure_table(const FigureSpec& spec) {
  CsvTable table{kFigureColumns, {}};
  for (const auto& curve : spec.curves) {
    for (const auto& p : curve.points) {
      table.rows.push_back({curve.name, curve.is_bound ? "bound" : "estimate", curve.transform, format_count(p.t),
                            format_optional(p.value), format_flag(p.valid), format_flag(p.vacuous)});
    }
  }
  return table;
}

std::string to_svg(const FigureSpec& spec) {
  constexpr double kWidth = 800, kHeight = 500;
  constexpr double kLeft = 80, kRight = 200, kTop = 40, kBottom = 60;
  constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                      "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

  auto x_of = [&](std::uint64_t t) { return spec.log_x ? std::log10(static_cast<double>(t)) : static_cast<double>(t); };

  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& curve : spec.curves) {
    for (const auto& p : curve.points) {
      if (!p.value || !std::isfinite(*p.value) || p.t == 0) continue;
      x_lo = std::min(x_lo, x_of(p.t));
      x_hi = std::max(x_hi, x_of(p.t));
      y_lo = std::min(y_lo, *p.value);
      y_hi = std::max(y_hi, *p.value);
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0.0;
    x_hi = 1.0;
    y_lo = 0.0;
    y_hi = 1.0;
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }
  const double pad = 0.05 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::ostringstream svg;
  svg.imbue(std::locale::classic());
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << spec.title
      << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / 5.0;
    const double y = y_lo + (y_hi - y_lo) * i / 5.0;
    const std::string x_text = spec.log_x ? "1e" + format_number(std::round(x * 100.0) / 100.0) : format_number(x);
    svg << "<line x1=\"" << px(x) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << px(x) << "\" y2=\""
        << kTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px(x) << "\" y=\"" << kTop + plot_h + 20 << "\" text-anchor=\"middle\">" << x_text
        << "</text>\n";
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << kLeft << "\" y2=\"" << py(y)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">"
        << format_number(std::round(y * 1e4) / 1e4) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
      << spec.x_label << (spec.log_x ? " (log scale)" : "") << "</text>\n";
  svg << "<text x=\"18\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kTop + plot_h / 2 << ")\">" << spec.y_label << "</text>\n";

  for (std::size_t ci = 0; ci < spec.curves.size(); ++ci) {
    const auto& curve = spec.curves[ci];
    const char* color = kPalette[ci % std::size(kPalette)];
    const char* dash = curve.is_bound ? " stroke-dasharray=\"6,4\"" : "";
    std::vector<std::string> segments;
    std::string current;
    for (const auto& p : curve.points) {
      if (!p.value || !std::isfinite(*p.value) || p.t == 0) {
        if (!current.empty()) segments.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (!current.empty()) current += ' ';
      current += format_number(px(x_of(p.t))) + ',' + format_number(py(*p.value));
    }
    if (!current.empty()) segments.push_back(std::move(current));
    for (const auto& seg : segments) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << dash << " points=\"" << seg
          << "\"/>\n";
    }
    const double ly = kTop + 10 + 18.0 * static_cast<double>(ci);
    svg << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 40
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << dash << "/>\n";
    svg << "<text x=\"" << kWidth - kRight + 45 << "\" y=\"" << ly + 4 << "\">" << curve.name << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_svg(const std::filesystem::path& path, const FigureSpec& spec) { write_file(path, to_svg(spec)); }

}  // namespace kglab
