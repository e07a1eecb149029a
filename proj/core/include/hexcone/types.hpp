#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hexcone {

using cplx = std::complex<double>;
using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;
using Mat6 = Eigen::Matrix<cplx, 6, 6>;
using Vec6 = Eigen::Matrix<cplx, 6, 1>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Mat2 = Eigen::Matrix<cplx, 2, 2>;
using Mat64 = Eigen::Matrix<cplx, 6, 4>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double sqrt3 = std::numbers::sqrt3;
inline const cplx I1{0.0, 1.0};

// Named failure conditions surfaced by the numerical pipelines.
enum class Failure {
  NoFourFoldDegeneracy,
  AlignmentFailure,
  VanishingSlope,
  NearZeroCoupling,
  GridTooCoarse,
  ContinuationAmbiguity,
  EnergyInSpectrum,
  GaugeMissing,
  EnergyOutsideGap,
  NoCharacteristicValue,
  DegenerateBoundaryData,
  GapCollapse,
  BranchLost,
  SingularHopping,
  NoCommonGap,
};

const char* failure_name(Failure f);

class NumericError : public std::runtime_error {
 public:
  NumericError(Failure kind, const std::string& what)
      : std::runtime_error(std::string(failure_name(kind)) + ": " + what), kind_(kind) {}
  Failure kind() const { return kind_; }

 private:
  Failure kind_;
};

// Raised when a model violates a standing assumption of the pipeline it is fed to.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hexcone
