#pragma once

#include <string>
#include <vector>

namespace logcalc {

/// Closed-form scalar time functions used by generator specs (time factor g)
/// and by forcing components. All have closed antiderivatives.
struct ScalarFunction {
    enum class Name { constant, cosine, poly, sqrt_abs };

    Name name = Name::constant;
    std::vector<double> params = {1.0};

    double operator()(double t) const;
    double antiderivative(double t) const;

    /// sup |f| over [a, b], by dense sampling plus endpoints.
    double sup_abs(double a, double b) const;

    static ScalarFunction constant(double c) { return {Name::constant, {c}}; }
    static ScalarFunction cosine() { return {Name::cosine, {}}; }
    static ScalarFunction poly(std::vector<double> coeffs) { return {Name::poly, std::move(coeffs)}; }
    static ScalarFunction sqrt_abs() { return {Name::sqrt_abs, {}}; }

    bool operator==(const ScalarFunction&) const = default;
};

std::string to_string(ScalarFunction::Name n);
ScalarFunction::Name scalar_function_name(const std::string& s);

} // namespace logcalc
