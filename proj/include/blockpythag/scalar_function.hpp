#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockpythag {

struct HypothesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scalar function on [0, inf) used by the functional-calculus certificates.
// Besides evaluation it carries declared shape properties (monotone
// direction, convexity/concavity of t -> f(sqrt(t))) which callers
// spot-verify numerically on the spectrum range they care about.
class ScalarFunction {
public:
    enum class Family { Power, Affine, Chord, Tabulated };

    static ScalarFunction power(double p);
    // a + b*t
    static ScalarFunction affine(double a, double b);
    // Equal to base above r; below r the graph of f(sqrt(s)) is the chord
    // from (0,0) to (r^2, base(r)), i.e. f(t) = (t/r)^2 * base(r).
    static ScalarFunction chord(const ScalarFunction& base, double r);
    // Piecewise-linear interpolant through (t_i, y_i), t ascending; clamped
    // to the end values outside the sample range.
    static ScalarFunction tabulated(std::vector<double> ts, std::vector<double> ys);

    double operator()(double t) const;
    double at0() const { return (*this)(0.0); }

    Family family() const { return family_; }
    bool monotone_nondecreasing() const { return nondecreasing_; }
    bool monotone_nonincreasing() const { return nonincreasing_; }
    bool sqrt_convex() const { return sqrt_convex_; }
    bool sqrt_concave() const { return sqrt_concave_; }

    // Grid checks of the declared properties on [lo, hi]; returns a message
    // quoting the violated hypothesis, or nullopt when everything holds.
    std::optional<std::string> spot_check(double lo, double hi) const;

    std::string describe() const;

private:
    ScalarFunction() = default;

    Family family_ = Family::Power;
    double p_ = 1.0;                 // Power exponent
    double a_ = 0.0, b_ = 1.0;       // Affine coefficients
    double r_ = 1.0;                 // Chord knee
    std::shared_ptr<ScalarFunction> base_;
    std::vector<double> ts_, ys_;    // Tabulated samples
    bool nondecreasing_ = true;
    bool nonincreasing_ = false;
    bool sqrt_convex_ = false;
    bool sqrt_concave_ = false;
};

// CLI mini-grammar: "pow:p=3", "affine:a=1,b=1",
// "chord:base=pow:q=1,r=0.5". Throws std::invalid_argument on bad input.
ScalarFunction parse_function_spec(const std::string& spec);

}  // namespace blockpythag
