// Coverage of the 95% HPD intervals for rho and lambda on simulated
// local-level data, over ten seeded replications.

#include <cstdio>

#include "ucgap/diagnostics.hpp"
#include "ucgap/sampler.hpp"

using namespace ucgap;

int main() {
  const ModelSpec spec = ModelSpec::parse("uni-ll");
  const PriorConfig prior = default_priors();
  ParameterVector truth = prior_means(spec, prior);
  truth[Param::Rho] = 0.9;
  truth[Param::Lambda] = 0.52;

  int covered_rho = 0, covered_lambda = 0;
  for (int seed = 1; seed <= 10; ++seed) {
    RandomStream data_rng(static_cast<std::uint64_t>(500 + seed));
    const SimulatedData sim = simulate_data(spec, truth, 216, data_rng);
    RunConfig cfg;
    cfg.n_iter = 40000;
    cfg.burn_in = 20000;
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.max_stored_paths = 10;
    const PosteriorDraws d = run_chain(spec, prior, sim.observations, cfg);
    const Interval rho = hpd_interval(d.column(Param::Rho));
    const Interval lambda = hpd_interval(d.column(Param::Lambda));
    const bool r = rho.lower <= truth[Param::Rho] && truth[Param::Rho] <= rho.upper;
    const bool l = lambda.lower <= truth[Param::Lambda] && truth[Param::Lambda] <= lambda.upper;
    covered_rho += r;
    covered_lambda += l;
    std::printf("seed %2d: rho [%.4f, %.4f]%s lambda [%.4f, %.4f]%s\n", seed, rho.lower, rho.upper,
                r ? "" : " MISS", lambda.lower, lambda.upper, l ? "" : " MISS");
    std::fflush(stdout);
  }
  const bool ok = covered_rho >= 8 && covered_lambda >= 8;
  std::printf("%s: rho covered %d/10, lambda covered %d/10\n", ok ? "PASS" : "FAIL", covered_rho, covered_lambda);
  return ok ? 0 : 1;
}
