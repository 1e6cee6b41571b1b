#pragma once

#include <algorithm>
#include <climits>

#include "ptori/errors.hpp"

namespace ptori {

namespace detail {

inline bool depends_on_axes(const FourierSeries& s, int n_axes) {
  bool dep = false;
  s.for_each_half([&](const Mode& k, const Complex&) {
    for (int a = 0; a < n_axes; ++a)
      if (k[a] != 0) dep = true;
  });
  return dep;
}

inline FourierSeries diff_multi(const FourierSeries& s, const std::vector<int>& alpha) {
  FourierSeries r = s;
  for (std::size_t a = 0; a < alpha.size(); ++a)
    for (int j = 0; j < alpha[a]; ++j) r = diff_theta(r, static_cast<int>(a));
  return r;
}

}  // namespace detail

template <class A>
A substitute(const TFPoly& f, const A& X, const A& Y, const std::vector<A>& delta) {
  A result = X.zero_like();
  if (f.is_zero()) return result;
  const int dim = f.dim();
  const int nd = static_cast<int>(delta.size());
  if (nd > dim) throw DimensionMismatch("substitute: more angle perturbations than torus axes");
  const int trunc = X.truncation();
  const FourierSeries one = FourierSeries::constant(dim, f.max_mode(), 1);

  std::vector<A> Xp{X.constant_like(one)};
  std::vector<A> Yp{X.constant_like(one)};
  for (int l = 1; l <= f.max_l(); ++l) Xp.push_back(Xp.back() * X);
  for (int m = 1; m <= f.max_m(); ++m) Yp.push_back(Yp.back() * Y);

  // monomials delta^alpha / alpha!
  struct Mono {
    std::vector<int> alpha;
    int last;
    A value;
  };
  std::vector<Mono> monos;
  int vd = INT_MAX;
  for (const auto& d : delta)
    if (!d.is_zero()) vd = std::min(vd, d.valuation());
  if (vd == 0) throw DimensionMismatch("substitute: angle perturbation must vanish at the origin");
  if (vd != INT_MAX && vd <= trunc) {
    const int depth = trunc / vd;
    std::vector<Mono> frontier{{std::vector<int>(nd, 0), 0, X.constant_like(one)}};
    for (int s = 1; s <= depth; ++s) {
      std::vector<Mono> next;
      for (const auto& mo : frontier) {
        for (int i = mo.last; i < nd; ++i) {
          if (delta[i].is_zero()) continue;
          Mono nm{mo.alpha, i, mo.value * delta[i]};
          nm.alpha[i] += 1;
          nm.value *= Real(1) / Real(nm.alpha[i]);
          if (nm.value.is_zero()) continue;
          next.push_back(nm);
        }
      }
      monos.insert(monos.end(), next.begin(), next.end());
      frontier = std::move(next);
    }
  }

  for (const auto& [lm, s] : f.terms()) {
    if (s.is_zero()) continue;
    A xy = Xp[lm.first] * Yp[lm.second];
    if (xy.is_zero()) continue;
    A coef = X.constant_like(s);
    if (!monos.empty() && detail::depends_on_axes(s, nd)) {
      for (const auto& mo : monos) {
        FourierSeries ds = detail::diff_multi(s, mo.alpha);
        if (ds.is_zero()) continue;
        coef += mo.value * ds;
      }
    }
    result += coef * xy;
  }
  return result;
}

}  // namespace ptori
