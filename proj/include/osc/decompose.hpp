#pragma once

#include <vector>

#include "osc/normalize.hpp"
#include "osc/quad.hpp"

namespace osc {

struct HeightSet {
  std::vector<double> normalized;  // h in (0, h_circ), handled through the normalized phase
  std::vector<double> direct;      // h >= h_circ, integrated in original coordinates
};

// Dyadic h with {h/2 <= Phi_v <= 2h} meeting [lo, hi], the range of Phi_v on the amplitude support.
// Heights below h_min are dropped; lo > hi means an empty support.
HeightSet dyadic_heights(double lo, double hi, double h_min, double h_circ);

// Range of Phi_v(x - omega) over {psi > 0}, estimated from stratified samples of the support box.
std::pair<double, double> phase_range(const PhaseFunction& phi_v, const AmplitudeField& psi, const Vec& omega,
                                      int samples_per_axis);

// One dyadic piece at height h: phase Psi = lambda h Phi^h + t log H, amplitude A and its splits.
// All fields live in the normalized coordinates y, with x = T y + omega.
class DyadicPiece {
 public:
  DyadicPiece(NormalizedPhase np, const CertReport& cert, AmplitudeField psi, double lambda, double t);

  int dim() const { return d_; }
  double h() const { return np_.h; }
  double lambda() const { return lambda_; }
  double t() const { return t_; }
  double C() const { return c_; }
  double fd_step() const { return step_; }
  double shell_rmax() const { return rmax_; }
  const NormalizedPhase& normalized() const { return np_; }
  const AmplitudeField& psi() const { return psi_; }
  // Covers {Phi^h <= 2}, hence supp A.
  const Box& box() const { return box_; }

  double phi(const Vec& y) const { return np_.phase->value(y); }
  double hdet(const Vec& y) const { return np_.phase->hdet(y); }
  // m-th derivative of H along e_l, m <= 3, by central differences.
  double hdet_deriv(int l, int m, const Vec& y) const;

  double Psi(const Vec& y) const;
  // d_l^m Psi for m = 1, 2, 3; the t terms are dropped where H = 0.
  double dPsi(int l, int m, const Vec& y) const;

  double A(const Vec& y) const;
  double A_l(int l, const Vec& y) const;
  double a_l(int l, const Vec& y) const;
  double A_lk(int l, int kappa, const Vec& y) const;
  // D_l^2(A_{l,1}) with D_l g = d_l(g / d_l Psi).
  double D2(int l, const Vec& y) const;

 private:
  double along(int l, const Vec& y, int m, const std::function<double(const Vec&)>& f) const;

  NormalizedPhase np_;
  AmplitudeField psi_;
  double lambda_;
  double t_;
  double c_;
  double step_;
  double rmax_;
  int d_;
  Box box_;
};

DyadicPiece build_piece(const NormalizedPhase& np, const CertReport& cert, const AmplitudeField& psi, double lambda,
                        double t);

struct PieceIntegral {
  OscResult rescaled;  // int e^{i Psi} A dy
  OscResult direct;    // I_v^h(lambda, t) in original coordinates
  cplx predicted;      // h^{d/2} (h^d / det T^2)^{it} * rescaled
};

PieceIntegral piece_integral(const DyadicPiece& piece, const QuadOptions& opts);

// int e^{i Psi} A_{l,kappa} dy.
OscResult piece_split_integral(const DyadicPiece& piece, int l, int kappa, const QuadOptions& opts);

// I_v^h(lambda, t) for any height, with no normalization: the direct path for h >= h_circ.
OscResult direct_height_integral(const PhaseFunction& phase, const AmplitudeField& psi, const Vec& v,
                                 const Vec& omega, double h, double lambda, double t, const QuadOptions& opts);

}  // namespace osc
