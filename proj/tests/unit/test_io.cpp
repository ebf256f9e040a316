#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ucgap/errors.hpp"
#include "ucgap/estimate.hpp"
#include "ucgap/io.hpp"

using namespace ucgap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ucgap_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SeriesFile series(Quarter start, const std::vector<double>& values) {
  SeriesFile s;
  for (double v : values) {
    s.dates.push_back(start);
    s.values.push_back(v);
    start = start.next();
  }
  return s;
}

}  // namespace

TEST_CASE("quarters") {
  const Quarter q = Quarter::parse("1960-Q4");
  CHECK(q.year == 1960);
  CHECK(q.q == 4);
  CHECK(q.next() == Quarter{1961, 1});
  CHECK(q.str() == "1960-Q4");
  CHECK(q.next().ordinal() - q.ordinal() == 1);
  for (const char* bad : {"1960Q1", "1960-Q5", "1960-Q0", "60-Q1", "1960-Q1x", ""})
    CHECK_THROWS_AS(Quarter::parse(bad), ValidationError);
}

TEST_CASE("series files") {
  std::istringstream ok("date,value\n1960-Q1,100\n1960-Q2,101\n1960-Q3,102\n1960-Q4,103\n");
  const SeriesFile s = parse_series(ok);
  CHECK(s.size() == 4);
  CHECK(s.dates.back() == Quarter{1960, 4});
  CHECK(s.values[2] == 102.0);

  std::istringstream gap("date,value\n1960-Q1,100\n1960-Q3,101\n");
  try {
    parse_series(gap, "gdp.csv");
    FAIL("expected a gap error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  std::istringstream dup("date,value\n1960-Q1,100\n1960-Q1,101\n");
  CHECK_THROWS_AS(parse_series(dup), ValidationError);
  std::istringstream neg("date,value\n1960-Q1,100\n1960-Q2,-1\n");
  CHECK_THROWS_AS(parse_series(neg), ValidationError);
  std::istringstream header("quarter,gdp\n1960-Q1,100\n");
  CHECK_THROWS_AS(parse_series(header), ValidationError);
  std::istringstream junk("date,value\n1960-Q1,abc\n");
  CHECK_THROWS_AS(parse_series(junk), ValidationError);
}

TEST_CASE("alignment to the common range") {
  std::vector<double> a(230, 1.0), b(240, 2.0);
  const SeriesFile ga = series({1958, 1}, a);
  const SeriesFile cb = series({1960, 1}, b);
  const auto [x, y] = align_series(ga, cb);
  CHECK(x.size() == y.size());
  CHECK(x.dates.front() == Quarter{1960, 1});
  CHECK(x.size() == 230 - 8);
  CHECK(x.dates == y.dates);
}

TEST_CASE("transformations") {
  const SeriesFile gdp = series({2000, 1}, std::vector<double>(12, std::exp(1.0)));
  const ModelData uni = transform(gdp, std::nullopt);
  CHECK(uni.observations.rows() == 12);
  CHECK(uni.observations.cols() == 1);
  CHECK((uni.observations.array() - 100.0).abs().maxCoeff() < 1e-12);

  std::vector<double> cpi(12);
  for (int i = 0; i < 12; ++i) cpi[i] = 100.0 * std::pow(1.01, i);
  const ModelData biv = transform(gdp, series({2000, 1}, cpi));
  CHECK(biv.observations.rows() == 11);
  CHECK(biv.dates.front() == Quarter{2000, 2});
  CHECK(biv.observations(0, 1) == doctest::Approx(400.0 * std::log(1.01)).epsilon(1e-12));

  const ModelData flat = transform(gdp, series({2000, 1}, std::vector<double>(12, 5.0)));
  CHECK(flat.observations.col(1).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(transform(series({2000, 1}, std::vector<double>(7, 1.0)), std::nullopt), ValidationError);
  CHECK_THROWS_AS(transform(series({2000, 1}, std::vector<double>(8, 1.0)), series({2000, 1}, std::vector<double>(8, 1.0))),
                  ValidationError);
}

TEST_CASE("simulated files round-trip through the transform") {
  const fs::path dir = scratch("sim");
  SimulateOptions opt;
  opt.spec = ModelSpec::parse("biv-lt");
  opt.params = prior_means(opt.spec, default_priors());
  opt.n_obs = 40;
  opt.seed = 5;
  opt.out_dir = dir;
  const ModelData direct = run_simulate(opt);
  CHECK(direct.observations.rows() == 40);
  const ModelData loaded = transform(load_series(dir / "gdp.csv"), load_series(dir / "cpi.csv"));
  CHECK(loaded.dates == direct.dates);
  CHECK((loaded.observations - direct.observations).cwiseAbs().maxCoeff() < 1e-10);
  const nlohmann::json truth = read_json(dir / "truth.json");
  CHECK(truth.at("spec") == "biv-lt");
  CHECK(truth.at("n_obs") == 40);
  fs::remove_all(dir);
}

TEST_CASE("json round trips") {
  PriorConfig prior = default_priors();
  prior.set_lambda_scale(LambdaScale::TwoPi);
  prior[Param::Rho] = Prior::beta(3.0, 4.0);
  const PriorConfig back = prior_config_from_json(prior_config_to_json(prior));
  CHECK(back.lambda_scale == LambdaScale::TwoPi);
  for (Param p : kAllParams) {
    CHECK(back[p].family == prior[p].family);
    CHECK(back[p].a == prior[p].a);
    CHECK(back[p].b == prior[p].b);
    CHECK(back[p].scale == prior[p].scale);
  }
  CHECK_THROWS_AS(prior_from_json(nlohmann::json{{"family", "cauchy"}}), ValidationError);

  RunConfig run;
  run.n_iter = 123;
  run.burn_in = 23;
  run.thin = 5;
  run.seed = 99;
  run.adaptation_constant = 7.5;
  run.adapt = false;
  const RunConfig rb = run_config_from_json(run_config_to_json(run));
  CHECK(rb.n_iter == 123);
  CHECK(rb.burn_in == 23);
  CHECK(rb.thin == 5);
  CHECK(rb.seed == 99);
  CHECK(rb.adaptation_constant == 7.5);
  CHECK(!rb.adapt);

  const ModelSpec spec = ModelSpec::parse("biv-lld");
  ParameterVector xi = prior_means(spec, default_priors());
  xi[Param::Theta1] = 0.1 / 3.0;
  CHECK(parameters_from_json(parameters_to_json(spec, xi)) == xi);
  CHECK_THROWS_AS(parameters_from_json(nlohmann::json{{"gamma", 1.0}}), ValidationError);

  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("draws and summary csv round trips") {
  const fs::path dir = scratch("csv");
  PosteriorDraws d;
  d.spec = ModelSpec::parse("uni-lt");
  d.params = active_params(d.spec);
  d.draws = Matrix::Random(6, static_cast<Eigen::Index>(d.params.size()));
  d.log_posterior = Vector::Random(6);
  write_draws_csv(dir / "draws.csv", d);
  const DrawTable t = read_draws_csv(dir / "draws.csv");
  CHECK(t.values == d.draws);
  CHECK(t.log_posterior == d.log_posterior);
  REQUIRE(t.names.size() == d.params.size());
  for (std::size_t k = 0; k < t.names.size(); ++k) CHECK(t.names[k] == param_name(d.params[k]));
  const PosteriorDraws rebuilt = draws_from_table(t);
  CHECK(rebuilt.spec == d.spec);

  std::vector<SummaryRow> rows{{"rho", 0.5, 0.1, 0.52, 0.3, 0.7, -0.4},
                               {"lambda", 0.5, 0.1, 0.5, std::nan(""), std::nan(""), std::nan("")}};
  write_summary_csv(dir / "summary.csv", rows);
  std::ifstream in(dir / "summary.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "Param,Mean,Std. Dev.,MaP,HPD lower,HPD upper,Geweke");
  const std::vector<SummaryRow> back = read_summary_csv(dir / "summary.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].param == "rho");
  CHECK(back[0].geweke == -0.4);
  CHECK(std::isnan(back[1].hpd_lower));
  fs::remove_all(dir);
}

TEST_CASE("estimate options") {
  EstimateOptions opt;
  opt.spec = ModelSpec::parse("biv-lt");
  opt.gdp_path = "gdp.csv";
  CHECK_THROWS_AS(opt.validate(), ValidationError);
  opt.cpi_path = "cpi.csv";
  CHECK_NOTHROW(opt.validate());
  opt.run.seed = 17;
  opt.chains = 3;
  const EstimateOptions back = estimate_options_from_json(estimate_options_to_json(opt));
  CHECK(back.spec == opt.spec);
  CHECK(back.run.seed == 17);
  CHECK(back.chains == 3);
  CHECK(back.cpi_path == opt.cpi_path);
  const EstimateOptions wrapped =
      estimate_options_from_json(nlohmann::json{{"config", estimate_options_to_json(opt)}});
  CHECK(wrapped.gdp_path == opt.gdp_path);
}
