#include "ucgap/random.hpp"

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace ucgap {

double RandomStream::uniform() {
  boost::random::uniform_01<double> dist;
  double u = 0.0;
  do {
    u = dist(engine_);
  } while (u <= 0.0);
  return u;
}

double RandomStream::normal() {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double RandomStream::gamma(double shape) {
  boost::random::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

double RandomStream::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

double RandomStream::inverse_gamma(double a, double b) { return b / gamma(a); }

}  // namespace ucgap
