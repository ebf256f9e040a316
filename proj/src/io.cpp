#include "ucgap/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ucgap/errors.hpp"

namespace ucgap {
namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && errno != ERANGE;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

std::string family_name(PriorFamily f) {
  switch (f) {
    case PriorFamily::InverseGamma: return "inverse_gamma";
    case PriorFamily::Beta: return "beta";
    case PriorFamily::Gaussian: return "gaussian";
  }
  return "?";
}

}  // namespace

Quarter Quarter::parse(const std::string& text) {
  const std::string t = trim(text);
  int year = 0;
  int q = 0;
  char tail = 0;
  if (t.size() != 7 || std::sscanf(t.c_str(), "%4d-Q%1d%c", &year, &q, &tail) != 2 || q < 1 ||
      q > 4)
    throw ValidationError("bad quarter '" + t + "', expected YYYY-Qn");
  return {year, q};
}

std::string Quarter::str() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-Q%d", year, q);
  return buf;
}

Quarter Quarter::next() const { return q == 4 ? Quarter{year + 1, 1} : Quarter{year, q + 1}; }

void SeriesFile::validate(const std::string& source) const {
  if (dates.size() != values.size())
    throw ValidationError(source + ": dates and values differ in length");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::string row = source + ": row " + std::to_string(i + 1);
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw ValidationError(row + ": value must be positive and finite");
    if (i > 0) {
      const long step = dates[i].ordinal() - dates[i - 1].ordinal();
      if (step == 0) throw ValidationError(row + ": duplicate date " + dates[i].str());
      if (step < 0) throw ValidationError(row + ": date " + dates[i].str() + " out of order");
      if (step > 1)
        throw ValidationError(row + ": gap between " + dates[i - 1].str() + " and " +
                              dates[i].str());
    }
  }
}

SeriesFile parse_series(std::istream& in, const std::string& source) {
  SeriesFile out;
  std::string line;
  bool header = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (!header) {
      if (cells.size() != 2 || cells[0] != "date" || cells[1] != "value")
        throw ValidationError(source + ": header must be 'date,value'");
      header = true;
      continue;
    }
    ++row;
    const std::string where = source + ": row " + std::to_string(row);
    if (cells.size() != 2) throw ValidationError(where + ": expected 2 fields");
    Quarter q;
    try {
      q = Quarter::parse(cells[0]);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    double v = 0.0;
    if (!parse_double(cells[1], v)) throw ValidationError(where + ": bad value '" + cells[1] + "'");
    out.dates.push_back(q);
    out.values.push_back(v);
  }
  if (!header) throw ValidationError(source + ": empty file");
  out.validate(source);
  return out;
}

SeriesFile load_series(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  return parse_series(in, path.string());
}

void write_series(const std::filesystem::path& path, const SeriesFile& series) {
  series.validate(path.string());
  std::ofstream out = open_out(path);
  out << "date,value\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << series.dates[i].str() << ',' << format_double(series.values[i]) << '\n';
}

std::pair<SeriesFile, SeriesFile> align_series(const SeriesFile& a, const SeriesFile& b) {
  if (a.size() == 0 || b.size() == 0) throw ValidationError("align_series: empty series");
  const long lo = std::max(a.dates.front().ordinal(), b.dates.front().ordinal());
  const long hi = std::min(a.dates.back().ordinal(), b.dates.back().ordinal());
  if (lo > hi) throw ValidationError("align_series: series do not overlap");
  const auto cut = [lo, hi](const SeriesFile& s) {
    SeriesFile out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const long o = s.dates[i].ordinal();
      if (o >= lo && o <= hi) {
        out.dates.push_back(s.dates[i]);
        out.values.push_back(s.values[i]);
      }
    }
    return out;
  };
  return {cut(a), cut(b)};
}

ModelData transform(const SeriesFile& gdp, const std::optional<SeriesFile>& cpi) {
  gdp.validate("gdp");
  ModelData out;
  if (!cpi) {
    const auto n = static_cast<Eigen::Index>(gdp.size());
    if (n < 8) throw ValidationError("need at least 8 observations, got " + std::to_string(n));
    out.observations.resize(n, 1);
    for (Eigen::Index t = 0; t < n; ++t)
      out.observations(t, 0) = 100.0 * std::log(gdp.values[static_cast<std::size_t>(t)]);
    out.dates = gdp.dates;
    return out;
  }
  cpi->validate("cpi");
  const auto [g, c] = align_series(gdp, *cpi);
  const auto n = static_cast<Eigen::Index>(g.size()) - 1;
  if (n < 8)
    throw ValidationError("need at least 8 observations after alignment, got " +
                          std::to_string(std::max<Eigen::Index>(n, 0)));
  out.observations.resize(n, 2);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto k = static_cast<std::size_t>(t + 1);
    out.observations(t, 0) = 100.0 * std::log(g.values[k]);
    out.observations(t, 1) = 400.0 * (std::log(c.values[k]) - std::log(c.values[k - 1]));
  }
  out.dates.assign(g.dates.begin() + 1, g.dates.end());
  return out;
}

json prior_to_json(const Prior& p) {
  json j{{"family", family_name(p.family)}};
  if (p.family == PriorFamily::Gaussian) {
    j["mean"] = p.a;
    j["variance"] = p.b;
  } else {
    j["a"] = p.a;
    j["b"] = p.b;
  }
  if (p.family == PriorFamily::Beta) j["scale"] = p.scale;
  return j;
}

Prior prior_from_json(const json& j) {
  const std::string fam = j.at("family").get<std::string>();
  Prior p;
  if (fam == "inverse_gamma") {
    p = Prior::inverse_gamma(j.at("a").get<double>(), j.at("b").get<double>());
  } else if (fam == "beta") {
    p = Prior::beta(j.at("a").get<double>(), j.at("b").get<double>(), j.value("scale", 1.0));
  } else if (fam == "gaussian") {
    p = Prior::gaussian(j.at("mean").get<double>(), j.at("variance").get<double>());
  } else {
    throw ValidationError("unknown prior family '" + fam + "'");
  }
  p.validate();
  return p;
}

json prior_config_to_json(const PriorConfig& cfg) {
  json priors = json::object();
  for (Param p : kAllParams) priors[std::string(param_name(p))] = prior_to_json(cfg[p]);
  return {{"lambda_scale", cfg.lambda_scale == LambdaScale::Pi ? "pi" : "2pi"},
          {"priors", priors}};
}

PriorConfig prior_config_from_json(const json& j, PriorConfig base) {
  if (j.contains("priors")) {
    for (const auto& [name, value] : j.at("priors").items()) {
      const auto p = param_from_name(name);
      if (!p) throw ValidationError("unknown prior parameter '" + name + "'");
      try {
        base[*p] = prior_from_json(value);
      } catch (const json::exception& e) {
        throw ValidationError("prior " + name + ": " + e.what());
      }
    }
  }
  if (j.contains("lambda_scale")) {
    const std::string s = j.at("lambda_scale").get<std::string>();
    if (s == "pi") {
      base.set_lambda_scale(LambdaScale::Pi);
    } else if (s == "2pi") {
      base.set_lambda_scale(LambdaScale::TwoPi);
    } else {
      throw ValidationError("lambda_scale must be 'pi' or '2pi'");
    }
  } else {
    base.set_lambda_scale(base.lambda_scale);
  }
  base.validate();
  return base;
}

json run_config_to_json(const RunConfig& cfg) {
  return {{"n_iter", cfg.n_iter},
          {"burn_in", cfg.burn_in},
          {"thin", cfg.thin},
          {"seed", cfg.seed},
          {"adaptation_constant", cfg.adaptation_constant},
          {"kappa_init", cfg.kappa_init},
          {"init_from_prior_draw", cfg.init_from_prior_draw},
          {"max_stored_paths", cfg.max_stored_paths},
          {"adapt", cfg.adapt}};
}

RunConfig run_config_from_json(const json& j, RunConfig base) {
  try {
    base.n_iter = j.value("n_iter", base.n_iter);
    base.burn_in = j.value("burn_in", base.burn_in);
    base.thin = j.value("thin", base.thin);
    base.seed = j.value("seed", base.seed);
    base.adaptation_constant = j.value("adaptation_constant", base.adaptation_constant);
    base.kappa_init = j.value("kappa_init", base.kappa_init);
    base.init_from_prior_draw = j.value("init_from_prior_draw", base.init_from_prior_draw);
    base.max_stored_paths = j.value("max_stored_paths", base.max_stored_paths);
    base.adapt = j.value("adapt", base.adapt);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("run configuration: ") + e.what());
  }
  base.validate();
  return base;
}

json parameters_to_json(const ModelSpec& spec, const ParameterVector& params) {
  json j = json::object();
  for (Param p : active_params(spec)) j[std::string(param_name(p))] = params[p];
  return j;
}

ParameterVector parameters_from_json(const json& j) {
  ParameterVector out;
  for (const auto& [name, value] : j.items()) {
    const auto p = param_from_name(name);
    if (!p) throw ValidationError("unknown parameter '" + name + "'");
    if (!value.is_number()) throw ValidationError("parameter " + name + " must be a number");
    out[*p] = value.get<double>();
  }
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_draws_csv(const std::filesystem::path& path, const PosteriorDraws& draws) {
  std::ofstream out = open_out(path);
  for (Param p : draws.params) out << param_name(p) << ',';
  out << "log_posterior\n";
  for (Eigen::Index i = 0; i < draws.n_keep(); ++i) {
    for (Eigen::Index j = 0; j < draws.draws.cols(); ++j) out << format_double(draws.draws(i, j)) << ',';
    out << format_double(draws.log_posterior(i)) << '\n';
  }
}

DrawTable read_draws_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty draws file");
  auto header = split_csv(trim(line));
  if (header.empty() || header.back() != "log_posterior")
    throw ValidationError(path.string() + ": last column must be log_posterior");
  header.pop_back();
  std::vector<std::vector<double>> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    ++row;
    const auto cells = split_csv(line);
    if (cells.size() != header.size() + 1)
      throw ValidationError(path.string() + ": row " + std::to_string(row) + ": wrong field count");
    std::vector<double> v(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (!parse_double(cells[k], v[k]))
        throw ValidationError(path.string() + ": row " + std::to_string(row) + ": bad number '" +
                              cells[k] + "'");
    }
    rows.push_back(std::move(v));
  }
  DrawTable t;
  t.names = header;
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size()));
  t.log_posterior.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < header.size(); ++k)
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    t.log_posterior(static_cast<Eigen::Index>(i)) = rows[i].back();
  }
  return t;
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out = open_out(path);
  out << "Param,Mean,Std. Dev.,MaP,HPD lower,HPD upper,Geweke\n";
  for (const SummaryRow& r : rows) {
    out << r.param << ',' << format_double(r.mean) << ',' << format_double(r.std_dev) << ','
        << format_double(r.map) << ',' << format_double(r.hpd_lower) << ','
        << format_double(r.hpd_upper) << ',' << format_double(r.geweke) << '\n';
  }
}

std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::getline(in, line);
  if (trim(line) != "Param,Mean,Std. Dev.,MaP,HPD lower,HPD upper,Geweke")
    throw ValidationError(path.string() + ": unexpected summary header");
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto c = split_csv(line);
    if (c.size() != 7) throw ValidationError(path.string() + ": summary row needs 7 fields");
    SummaryRow r;
    r.param = c[0];
    double* fields[] = {&r.mean, &r.std_dev, &r.map, &r.hpd_lower, &r.hpd_upper, &r.geweke};
    for (std::size_t k = 0; k < 6; ++k) {
      if (!parse_double(c[k + 1], *fields[k]))
        throw ValidationError(path.string() + ": bad number '" + c[k + 1] + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

void write_turning_points_csv(const std::filesystem::path& path,
                              const std::vector<TurningPoint>& points,
                              const std::vector<Quarter>& dates) {
  std::ofstream out = open_out(path);
  out << "date,index,kind\n";
  for (const TurningPoint& tp : points) {
    const auto k = static_cast<std::size_t>(tp.index);
    out << (k < dates.size() ? dates[k].str() : std::string()) << ',' << tp.index << ','
        << (tp.kind == TurningKind::Peak ? "peak" : "trough") << '\n';
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace ucgap
