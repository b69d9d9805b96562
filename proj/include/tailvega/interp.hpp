#pragma once

#include <string>
#include <vector>

namespace tailvega {

// Monotone cubic interpolant (Fritsch-Carlson). Given nondecreasing data the
// interpolant is nondecreasing everywhere; its derivative is therefore a
// usable nonnegative density.
class MonotoneCubic {
  public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double derivative(double x) const;

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

  private:
    std::size_t segment(double x) const;

    std::vector<double> x_, y_, slope_;
};

struct LinearTable {
    std::vector<double> x, y;

    // Linear interpolation inside the hull; throws OutOfDomain outside.
    double operator()(double at) const;
};

// Two-column CSV with a mandatory header row naming exactly the two expected
// columns. Returns column vectors; x strictly increasing is enforced.
struct CsvColumns {
    std::vector<double> x, y;
};
CsvColumns read_two_column_csv(const std::string& path,
                               const std::string& x_header,
                               const std::string& y_header);

}  // namespace tailvega
