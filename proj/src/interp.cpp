#include "tailvega/interp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tailvega/errors.hpp"

namespace tailvega {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw ConfigError("interpolant needs at least two matched points");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw ConfigError("interpolant abscissae must be strictly increasing");

    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }

    slope_.assign(n, 0.0);
    slope_[0] = delta[0];
    slope_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            slope_[i] = 0.0;
        } else {
            // weighted harmonic mean keeps the interpolant monotone
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            slope_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // clamp endpoint slopes (Fritsch-Carlson condition)
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (delta[i] == 0.0) {
            slope_[i] = slope_[i + 1] = 0.0;
        } else {
            const double a = slope_[i] / delta[i];
            const double b = slope_[i + 1] / delta[i];
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double t = 3.0 / std::sqrt(s);
                slope_[i] = t * a * delta[i];
                slope_[i + 1] = t * b * delta[i];
            }
        }
    }
}

std::size_t MonotoneCubic::segment(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    if (it == x_.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

double MonotoneCubic::operator()(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] +
           h11 * h * slope_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
    if (x < x_.front() || x > x_.back()) return 0.0;
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double d00 = (6 * t2 - 6 * t) / h;
    const double d10 = 3 * t2 - 4 * t + 1;
    const double d01 = (-6 * t2 + 6 * t) / h;
    const double d11 = 3 * t2 - 2 * t;
    return d00 * y_[i] + d10 * slope_[i] + d01 * y_[i + 1] + d11 * slope_[i + 1];
}

double LinearTable::operator()(double at) const {
    if (x.empty()) throw OutOfDomain("table is empty");
    if (at < x.front() || at > x.back())
        throw OutOfDomain("value outside the tabulated hull; no extrapolation");
    auto it = std::upper_bound(x.begin(), x.end(), at);
    if (it == x.begin()) return y.front();
    std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    i = std::min(i, x.size() - 2);
    const double t = (at - x[i]) / (x[i + 1] - x[i]);
    return y[i] + t * (y[i + 1] - y[i]);
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

CsvColumns read_two_column_csv(const std::string& path,
                               const std::string& x_header,
                               const std::string& y_header) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open CSV file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("CSV file is empty: " + path);
    std::stringstream header(line);
    std::string h1, h2;
    std::getline(header, h1, ',');
    std::getline(header, h2, ',');
    if (trim(h1) != x_header || trim(h2) != y_header)
        throw ConfigError("CSV header must be '" + x_header + "," + y_header +
                          "' in " + path);

    CsvColumns cols;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string c1, c2;
        std::getline(ss, c1, ',');
        std::getline(ss, c2, ',');
        try {
            cols.x.push_back(std::stod(trim(c1)));
            cols.y.push_back(std::stod(trim(c2)));
        } catch (const std::exception&) {
            throw ConfigError("bad CSV row " + std::to_string(row) + " in " + path);
        }
    }
    if (cols.x.size() < 2)
        throw ConfigError("CSV needs at least two data rows: " + path);
    for (std::size_t i = 1; i < cols.x.size(); ++i)
        if (!(cols.x[i] > cols.x[i - 1]))
            throw ConfigError("CSV x column must be strictly increasing: " + path);
    return cols;
}

}  // namespace tailvega
