#pragma once

#include <string>
#include <vector>

namespace spectriples {

/// Bounded real coefficient q of the zeroth-order term, given as a named preset.
class Potential {
 public:
  enum class Kind { constant, well, mathieu, tabulated };

  static Potential constant(double value);
  /// q = base outside |x - center| < width/2, base - depth inside.
  static Potential well(double base, double depth, double width, double center);
  /// q = amplitude * cos(2x) + shift.
  static Potential mathieu(double amplitude, double shift);
  /// Piecewise-linear interpolation of equispaced samples on [start, end], constant beyond.
  static Potential tabulated(std::vector<double> samples, double start, double end);

  Potential() = default;

  double operator()(double x) const;

  Kind kind() const { return kind_; }
  double lower_bound() const;
  std::string describe() const;

  // Raw parameters, used when echoing a configuration.
  double value() const { return value_; }
  double depth() const { return depth_; }
  double width() const { return width_; }
  double center() const { return center_; }
  double amplitude() const { return amplitude_; }
  double shift() const { return shift_; }
  const std::vector<double>& samples() const { return samples_; }
  double start() const { return start_; }
  double end() const { return end_; }

 private:
  Kind kind_ = Kind::constant;
  double value_ = 0.0;
  double depth_ = 0.0;
  double width_ = 0.0;
  double center_ = 0.0;
  double amplitude_ = 0.0;
  double shift_ = 0.0;
  std::vector<double> samples_;
  double start_ = 0.0;
  double end_ = 1.0;
};

}  // namespace spectriples
