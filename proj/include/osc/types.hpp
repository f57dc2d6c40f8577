#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace osc {

// Dimensions up to 6 live on the stack; nothing in the hot loops allocates.
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using cplx = std::complex<double>;

struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& x, double slack = 0.0) const;
  double volume() const;
  Vec center() const { return 0.5 * (lo + hi); }
  static Box cube(const Vec& center, double half_width);
  static Box cube(int d, double half_width);
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define OSC_ERROR_TYPE(Name) \
  class Name : public Error { \
   public: \
    using Error::Error; \
  }

OSC_ERROR_TYPE(DomainError);
OSC_ERROR_TYPE(UndefinedValueError);
OSC_ERROR_TYPE(NotFiniteTypeError);
OSC_ERROR_TYPE(OutsideGradientImageError);
OSC_ERROR_TYPE(HeightTooLargeError);
OSC_ERROR_TYPE(RankDeficiencyError);
OSC_ERROR_TYPE(CertificationError);
OSC_ERROR_TYPE(PreconditionError);
OSC_ERROR_TYPE(DegenerateFitError);
OSC_ERROR_TYPE(GridTooSmallError);
OSC_ERROR_TYPE(UnsupportedInputError);
OSC_ERROR_TYPE(ConfigError);
OSC_ERROR_TYPE(SchemaError);

#undef OSC_ERROR_TYPE

Vec make_vec(std::initializer_list<double> xs);
Vec zeros(int d);
Vec unit(int d, int i);

// Pairwise summation in a fixed tree order, so the result does not depend on threading.
cplx pairwise_sum(const cplx* xs, std::size_t n);
double pairwise_sum(const double* xs, std::size_t n);

}  // namespace osc
