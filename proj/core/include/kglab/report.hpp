#pragma once

// File output for experiments: CSV tables with fixed column order, the t-grid
// mini-language, and a dependency-free SVG line chart.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kglab/bounds.hpp"
#include "kglab/montecarlo.hpp"

namespace kglab {

/// '.'-decimal, shortest round-trip digits; scientific for 0 < |x| < 1e-4
/// and for |x| >= 1e15. NaN prints as an empty field.
std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 quoting, '\n' line ends, header first.
std::string to_csv(const CsvTable& table);
void emit_csv(const std::filesystem::path& path, const CsvTable& table);

inline const std::vector<std::string> kMeasuresColumns = {
    "t",      "pe_hat", "pe_stderr", "pe_upper",  "pe_lower", "sr_hat",     "sr_stderr",
    "sr_upper", "sr_lower", "cr_hat", "cr_stderr", "cr_upper", "confidence", "vacuous"};
inline const std::vector<std::string> kAlphaColumns = {"t",           "arm",         "alpha_hat", "alpha_stderr",
                                                       "alpha_lower", "alpha_upper", "valid"};
inline const std::vector<std::string> kBoundsColumns = {
    "t",          "valid",      "vacuous",       "q",           "confidence",   "pe_upper",
    "pe_lower",   "sr_upper",   "sr_lower",      "log_pe_upper", "log_pe_lower", "log_sr_upper",
    "log_sr_lower", "cr_upper", "cr_upper_per_t"};
inline const std::vector<std::string> kBoundsArmColumns = {"t",           "arm",         "rho_lower", "rho_upper",
                                                           "alpha_lower", "alpha_upper", "valid"};
inline const std::vector<std::string> kFigureColumns = {"series", "kind", "transform", "t",
                                                        "value",  "valid", "vacuous"};

/// One row per checkpoint; `bounds[c]` must be evaluated at checkpoint c.
CsvTable measures_table(const EstimateSeries& series, const std::vector<BoundSet>& bounds);
/// One row per (checkpoint, arm); arms are printed 1-based.
CsvTable alpha_table(const EstimateSeries& series, const std::vector<BoundSet>& bounds);
CsvTable bounds_table(const std::vector<BoundSet>& bounds);
CsvTable bounds_arm_table(const std::vector<BoundSet>& bounds);

/// Parses `geometric:<start>:<stop>:<points>` or `list:a,b,c`. Values are
/// floored to integers, deduplicated and sorted.
std::vector<std::uint64_t> parse_t_grid(std::string_view spec);

enum class FigureKind { kSamplingRates, kPe, kSr, kCr, kBoundsOnly };
FigureKind parse_figure_kind(std::string_view name);
std::string_view figure_kind_name(FigureKind kind);

struct CurvePoint {
  std::uint64_t t = 0;
  std::optional<double> value;  // nullopt = gap, not drawn
  bool valid = true;
  bool vacuous = false;
};

struct Curve {
  std::string name;
  bool is_bound = false;  // bounds are dashed
  std::string transform;  // e.g. "neg_log_over_t", "over_t", "identity"
  std::vector<CurvePoint> points;
};

struct FigureSpec {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  bool log_x = true;
  std::vector<Curve> curves;
};

/// Default arm selection: lowest non-best, median non-best, best.
std::vector<ArmIndex> default_figure_arms(const BanditInstance& inst);

/// Builds the curves for one figure kind. `series` may be null (bounds only).
FigureSpec make_figure(FigureKind kind, const BanditInstance& inst, const EstimateSeries* series,
                       const std::vector<BoundSet>& bounds, const std::vector<ArmIndex>& arms);

CsvTable figure_table(const FigureSpec& spec);
std::string to_svg(const FigureSpec& spec);
void emit_svg(const std::filesystem::path& path, const FigureSpec& spec);

}  // namespace kglab
