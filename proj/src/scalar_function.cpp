#include "logcalc/scalar_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "logcalc/errors.hpp"

namespace logcalc {

double ScalarFunction::operator()(double t) const {
    switch (name) {
        case Name::constant:
            return params.at(0);
        case Name::cosine:
            return std::cos(t);
        case Name::poly: {
            // Horner
            double v = 0.0;
            for (auto it = params.rbegin(); it != params.rend(); ++it) v = v * t + *it;
            return v;
        }
        case Name::sqrt_abs:
            return std::sqrt(std::abs(t));
    }
    throw std::logic_error("unreachable scalar function kind");
}

double ScalarFunction::antiderivative(double t) const {
    switch (name) {
        case Name::constant:
            return params.at(0) * t;
        case Name::cosine:
            return std::sin(t);
        case Name::poly: {
            double v = 0.0;
            for (std::size_t i = params.size(); i-- > 0;) {
                v = v * t + params[i] / static_cast<double>(i + 1);
            }
            return v * t;
        }
        case Name::sqrt_abs:
            // odd primitive of sqrt(|t|)
            return (t < 0 ? -1.0 : 1.0) * (2.0 / 3.0) * std::pow(std::abs(t), 1.5);
    }
    throw std::logic_error("unreachable scalar function kind");
}

double ScalarFunction::sup_abs(double a, double b) const {
    if (a > b) std::swap(a, b);
    switch (name) {
        case Name::constant:
            return std::abs(params.at(0));
        case Name::cosine:
            return 1.0; // attained whenever [a,b] spans a multiple of pi; safe bound otherwise
        default:
            break;
    }
    constexpr int kSamples = 1024;
    double m = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
        const double t = a + (b - a) * static_cast<double>(i) / kSamples;
        m = std::max(m, std::abs((*this)(t)));
    }
    return m;
}

std::string to_string(ScalarFunction::Name n) {
    switch (n) {
        case ScalarFunction::Name::constant: return "const";
        case ScalarFunction::Name::cosine: return "cos";
        case ScalarFunction::Name::poly: return "poly";
        case ScalarFunction::Name::sqrt_abs: return "sqrt_abs";
    }
    throw std::logic_error("unreachable scalar function kind");
}

ScalarFunction::Name scalar_function_name(const std::string& s) {
    if (s == "const") return ScalarFunction::Name::constant;
    if (s == "cos") return ScalarFunction::Name::cosine;
    if (s == "poly") return ScalarFunction::Name::poly;
    if (s == "sqrt_abs") return ScalarFunction::Name::sqrt_abs;
    throw SchemaViolation("unknown scalar function name: " + s);
}

} // namespace logcalc
