#include "plate/exponents.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace plate {

ExponentSet derive_exponents(int N, double t, double p, double q) {
  if (N != 2 && N != 3) throw std::invalid_argument("N must be 2 or 3");
  if (!(t > N)) throw std::invalid_argument("t must exceed N");
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (!(q > 2.0 && q < 2.0 * p))
    throw std::invalid_argument("q must lie in (2, 2p)");

  ExponentSet e;
  e.N = N;
  e.t = t;
  e.p = p;
  e.q = q;

  const double Nd = static_cast<double>(N);
  e.s = 2.0 * q * Nd * (p - 1.0) /
        (Nd * (2.0 * p - q) + 2.0 * q * (p - 1.0));
  if (!(e.s > 1.0 && e.s < Nd)) {
    std::ostringstream msg;
    msg << "inadmissible (p,q) for this N: s = " << e.s;
    throw std::invalid_argument(msg.str());
  }
  e.s_star = Nd * e.s / (Nd - e.s);

  e.beta = 1.0 - 2.0 / q +
           (1.0 - e.s / t) * (e.s_star / e.s) * (2.0 * p - q) / (p * q);

  // positive root of theta^2 - theta/p - beta = 0
  e.theta = 0.5 * (1.0 / p + std::sqrt(1.0 / (p * p) + 4.0 * e.beta));
  if (!(e.theta > 1.0)) throw std::invalid_argument("degenerate exponent system");

  e.xi = 1.0;
  e.eta = e.beta / e.theta;

  e.mu = (2.0 * e.xi * (p - 1.0) / p + 2.0 * e.eta) / (e.theta - 1.0);

  e.a = e.xi * (e.theta - 1.0) / (2.0 * e.eta) +
        e.xi * (p - 1.0) / (2.0 * e.eta * p);
  e.b = (e.xi / e.eta + Nd / 2.0) * (e.theta - 1.0);
  e.c = (e.xi / e.eta) * (p - 1.0) / p;
  return e;
}

ExponentResiduals validate_exponents(const ExponentSet& e) {
  ExponentResiduals r;
  r.quadratic = std::abs(e.theta * e.theta - e.theta / e.p - e.beta);
  r.system_row1 = std::abs(e.xi / e.p + e.eta - e.theta * e.xi);
  r.system_row2 = std::abs(e.beta * e.xi - e.theta * e.eta);
  const double Nd = static_cast<double>(e.N);
  r.s_star_identity = std::abs(Nd * e.s / (Nd - e.s) -
                               2.0 * e.q * (e.p - 1.0) / (2.0 * e.p - e.q));
  r.theta_above_one = e.theta > 1.0;
  r.a_below_one = e.a < 1.0;
  return r;
}

std::string describe(const ExponentSet& e) {
  std::ostringstream os;
  os << "N=" << e.N << " t=" << e.t << " p=" << e.p << " q=" << e.q
     << " s=" << e.s << " s*=" << e.s_star << " beta=" << e.beta
     << " theta=" << e.theta << " eta=" << e.eta << " mu=" << e.mu
     << " a=" << e.a << " b=" << e.b << " c=" << e.c;
  return os.str();
}

}  // namespace plate
