#pragma once

// Direct tensor contraction of the derivative table, used to check the
// appendix coefficient vectors term by term.

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "mussel/normal_form.hpp"

namespace oracle {

using mussel::Arg;
using mussel::DerivTable;
using mussel::EigenData;
using V4 = std::array<std::complex<double>, 4>;

// Full derivative tensors of a DerivTable, indexed [component][i][j](k).
struct Tensors {
  double H[2][4][4] = {};
  double T[2][4][4][4] = {};
};

inline Tensors expand(const DerivTable& dt) {
  Tensors t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const Eigen::Vector2d v = dt(Arg(i), Arg(j));
      for (int c = 0; c < 2; ++c) t.H[c][i][j] = v(c);
      for (int k = 0; k < 4; ++k) {
        const Eigen::Vector2d w = dt(Arg(i), Arg(j), Arg(k));
        for (int c = 0; c < 2; ++c) t.T[c][i][j][k] = w(c);
      }
    }
  return t;
}

inline Eigen::Vector2cd F2(const Tensors& t, const V4& x, const V4& y) {
  Eigen::Vector2cd out = Eigen::Vector2cd::Zero();
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out(c) += t.H[c][i][j] * x[i] * y[j];
  return out;
}

inline Eigen::Vector2cd F3(const Tensors& t, const V4& x, const V4& y, const V4& z) {
  Eigen::Vector2cd out = Eigen::Vector2cd::Zero();
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) out(c) += t.T[c][i][j][k] * x[i] * y[j] * z[k];
  return out;
}

inline V4 conj4(const V4& v) {
  return {std::conj(v[0]), std::conj(v[1]), std::conj(v[2]), std::conj(v[3])};
}

struct Comparison {
  std::string name;
  Eigen::Vector2cd got, want;
  // |got - want| relative to max(1, |want|).
  double error() const {
    return (got - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff());
  }
};

// Every coefficient vector next to its direct tensor contraction.
inline std::vector<Comparison> appendix_comparisons(const EigenData& ed, const DerivTable& dt) {
  const mussel::AppendixVectors v = mussel::appendix_vectors(ed, dt);
  const Tensors t = expand(dt);
  const std::complex<double> q = ed.q(1), p1 = ed.p(1);
  const std::complex<double> e = std::exp(std::complex<double>(0.0, -ed.th.omega0 * ed.th.tau0));
  const V4 vq{1.0, q, e, q * e};
  const V4 vqb = conj4(vq);
  const V4 vp{1.0, p1, 1.0, p1};
  std::vector<Comparison> out = {
      {"F200", v.F200, F2(t, vq, vq)},
      {"F110", v.F110, 2.0 * F2(t, vq, vqb)},
      {"F101", v.F101, 2.0 * F2(t, vq, vp)},
      {"F002", v.F002, F2(t, vp, vp)},
      {"F020", v.F020, F2(t, vqb, vqb)},
      {"F011", v.F011, 2.0 * F2(t, vqb, vp)},
      {"F210", v.F210, 3.0 * F3(t, vq, vq, vqb)},
      {"F102", v.F102, 3.0 * F3(t, vq, vp, vp)},
      {"F111", v.F111, 6.0 * F3(t, vq, vqb, vp)},
      {"F003", v.F003, F3(t, vp, vp, vp)}};
  // F_{y_i(theta) z}: y1(0) = m, y2(0) = a, y1(-1) = m_tau, y2(-1) = a_tau.
  for (int i = 0; i < 2; ++i)
    for (int s = 0; s < 2; ++s) {
      V4 unit{0.0, 0.0, 0.0, 0.0};
      unit[2 * s + i] = 1.0;
      const std::string tag = "[" + std::to_string(i) + "][" + std::to_string(s) + "]";
      out.push_back({"Fy_z1" + tag, v.Fy_z1[i][s], 2.0 * F2(t, unit, vq)});
      out.push_back({"Fy_z2" + tag, v.Fy_z2[i][s], 2.0 * F2(t, unit, vp)});
    }
  return out;
}

}  // namespace oracle
