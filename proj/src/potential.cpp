#include "spectriples/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spectriples/types.hpp"

namespace spectriples {

Potential Potential::constant(double value) {
  Potential p;
  p.kind_ = Kind::constant;
  p.value_ = value;
  return p;
}

Potential Potential::well(double base, double depth, double width, double center) {
  if (!(width > 0.0)) throw Error(ErrorKind::invalid_config, "well width must be positive");
  Potential p;
  p.kind_ = Kind::well;
  p.value_ = base;
  p.depth_ = depth;
  p.width_ = width;
  p.center_ = center;
  return p;
}

Potential Potential::mathieu(double amplitude, double shift) {
  Potential p;
  p.kind_ = Kind::mathieu;
  p.amplitude_ = amplitude;
  p.shift_ = shift;
  return p;
}

Potential Potential::tabulated(std::vector<double> samples, double start, double end) {
  if (samples.size() < 2) throw Error(ErrorKind::invalid_config, "tabulated potential needs two samples");
  if (!(end > start)) throw Error(ErrorKind::invalid_config, "tabulated potential range is empty");
  for (double s : samples)
    if (!std::isfinite(s)) throw Error(ErrorKind::invalid_config, "tabulated potential is not finite");
  Potential p;
  p.kind_ = Kind::tabulated;
  p.samples_ = std::move(samples);
  p.start_ = start;
  p.end_ = end;
  return p;
}

double Potential::operator()(double x) const {
  switch (kind_) {
    case Kind::constant:
      return value_;
    case Kind::well:
      return std::abs(x - center_) < width_ / 2.0 ? value_ - depth_ : value_;
    case Kind::mathieu:
      return amplitude_ * std::cos(2.0 * x) + shift_;
    case Kind::tabulated: {
      const auto last = static_cast<double>(samples_.size() - 1);
      const double t = std::clamp((x - start_) / (end_ - start_), 0.0, 1.0) * last;
      const auto i = std::min(static_cast<std::size_t>(t), samples_.size() - 2);
      const double f = t - static_cast<double>(i);
      return (1.0 - f) * samples_[i] + f * samples_[i + 1];
    }
  }
  return 0.0;
}

double Potential::lower_bound() const {
  switch (kind_) {
    case Kind::constant: return value_;
    case Kind::well: return std::min(value_, value_ - depth_);
    case Kind::mathieu: return shift_ - std::abs(amplitude_);
    case Kind::tabulated: return *std::min_element(samples_.begin(), samples_.end());
  }
  return 0.0;
}

std::string Potential::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::constant: os << "constant(" << value_ << ")"; break;
    case Kind::well:
      os << "well(base=" << value_ << ",depth=" << depth_ << ",width=" << width_
         << ",center=" << center_ << ")";
      break;
    case Kind::mathieu: os << "mathieu(amplitude=" << amplitude_ << ",shift=" << shift_ << ")"; break;
    case Kind::tabulated: os << "tabulated(" << samples_.size() << " samples)"; break;
  }
  return os.str();
}

}  // namespace spectriples
