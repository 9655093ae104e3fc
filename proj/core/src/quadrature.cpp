#include "diagline/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "diagline/errors.hpp"

namespace diagline {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  Complex value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<Complex(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const Complex fc = f(c);
  Complex k = fc * kWgk[7];
  Complex g = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    const Complex s = f(c - dx) + f(c + dx);
    k += kWgk[i] * s;
    if (i % 2 == 1) g += kWg[i / 2] * s;
  }
  k *= h;
  g *= h;
  return {a, b, k, std::abs(k - g)};
}

}  // namespace

QuadratureResult integrate_gk15(const std::function<Complex(double)>& f, double a, double b, int initial,
                                const QuadratureConfig& cfg) {
  initial = std::max(initial, 1);
  if (initial > cfg.max_panels)
    throw QuadratureError("integrand needs more initial panels than the budget allows", 0.0, 0.0,
                          static_cast<double>(initial));
  std::vector<double> breaks;
  const double w = (b - a) / initial;
  for (int i = 0; i < initial; ++i) breaks.push_back(a + w * i);
  breaks.push_back(b);
  return integrate_gk15(f, breaks, cfg);
}

QuadratureResult integrate_gk15(const std::function<Complex(double)>& f, const std::vector<double>& breaks,
                                const QuadratureConfig& cfg) {
  if (breaks.size() < 2) throw std::invalid_argument("need at least two breakpoints");
  const int initial = static_cast<int>(breaks.size()) - 1;
  if (initial > cfg.max_panels)
    throw QuadratureError("integrand needs more initial panels than the budget allows", 0.0, 0.0,
                          static_cast<double>(initial));
  std::priority_queue<Panel> heap;
  for (int i = 0; i < initial; ++i) heap.push(gk15(f, breaks[static_cast<std::size_t>(i)], breaks[static_cast<std::size_t>(i) + 1]));
  auto totals = [&heap] {
    // Summed in a fixed order so repeated runs agree bit for bit.
    std::vector<Panel> all;
    auto copy = heap;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    Complex v = 0;
    double e = 0;
    for (const auto& p : all) {
      v += p.value;
      e += p.error;
    }
    return std::pair{v, e};
  };
  double err = 0;
  {
    std::priority_queue<Panel> copy = heap;
    while (!copy.empty()) {
      err += copy.top().error;
      copy.pop();
    }
  }
  int panels = initial;
  while (err > cfg.abs_tol) {
    if (panels >= cfg.max_panels) {
      auto [v, e] = totals();
      throw QuadratureError("quadrature tolerance not reached within the panel budget", v.real(), v.imag(), e);
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel l = gk15(f, worst.a, mid), r = gk15(f, mid, worst.b);
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    ++panels;
    if (err < 0) err = 0;
  }
  auto [v, e] = totals();
  return {v, e, panels};
}

}  // namespace diagline
