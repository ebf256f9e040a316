#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucgap/diagnostics.hpp"
#include "ucgap/models.hpp"
#include "ucgap/priors.hpp"
#include "ucgap/sampler.hpp"

namespace ucgap {

/// Calendar quarter, written "YYYY-Qn".
struct Quarter {
  int year = 1960;
  int q = 1;  // 1..4

  static Quarter parse(const std::string& text);
  std::string str() const;
  Quarter next() const;
  /// Quarters since year 0, Q1.
  long ordinal() const { return 4L * year + (q - 1); }

  friend bool operator==(const Quarter&, const Quarter&) = default;
};

/// One quarterly level series. Dates are consecutive, values positive.
struct SeriesFile {
  std::vector<Quarter> dates;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  /// Throws ValidationError naming the first offending row (1-based, header excluded).
  void validate(const std::string& source = "series") const;
};

SeriesFile parse_series(std::istream& in, const std::string& source = "series");
SeriesFile load_series(const std::filesystem::path& path);
void write_series(const std::filesystem::path& path, const SeriesFile& series);

/// Trims both series to their common date range.
std::pair<SeriesFile, SeriesFile> align_series(const SeriesFile& a, const SeriesFile& b);

struct ModelData {
  ObservationMatrix observations;  // y = 100 log GDP, and pi = 400 dlog CPI
  std::vector<Quarter> dates;
};

/// Univariate: y only. Bivariate: aligns, then drops the first quarter of both
/// series so that y_t and pi_t share dates. Fewer than 8 rows is an error.
ModelData transform(const SeriesFile& gdp, const std::optional<SeriesFile>& cpi);

// JSON forms of the configuration types.
nlohmann::json prior_to_json(const Prior& p);
Prior prior_from_json(const nlohmann::json& j);
nlohmann::json prior_config_to_json(const PriorConfig& cfg);
/// Starts from `base` and applies the entries present in `j`.
PriorConfig prior_config_from_json(const nlohmann::json& j, PriorConfig base = default_priors());
nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
nlohmann::json parameters_to_json(const ModelSpec& spec, const ParameterVector& params);
/// Missing entries are zero; unknown names are rejected.
ParameterVector parameters_from_json(const nlohmann::json& j);

std::string format_double(double x);

/// Header: active parameter names then log_posterior.
void write_draws_csv(const std::filesystem::path& path, const PosteriorDraws& draws);

struct DrawTable {
  std::vector<std::string> names;  // parameter columns, without log_posterior
  Matrix values;
  Vector log_posterior;
};
DrawTable read_draws_csv(const std::filesystem::path& path);

/// Columns: Param,Mean,Std. Dev.,MaP,HPD lower,HPD upper,Geweke
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path);

void write_turning_points_csv(const std::filesystem::path& path,
                              const std::vector<TurningPoint>& points,
                              const std::vector<Quarter>& dates);

void write_text(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace ucgap
