#include "blockpythag/scalar_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace blockpythag {

ScalarFunction ScalarFunction::power(double p) {
    if (!(p > 0.0)) throw std::invalid_argument("power function needs exponent p > 0");
    ScalarFunction f;
    f.family_ = Family::Power;
    f.p_ = p;
    f.nondecreasing_ = true;
    f.nonincreasing_ = false;
    f.sqrt_convex_ = p >= 2.0;
    f.sqrt_concave_ = p <= 2.0;
    return f;
}

ScalarFunction ScalarFunction::affine(double a, double b) {
    ScalarFunction f;
    f.family_ = Family::Affine;
    f.a_ = a;
    f.b_ = b;
    f.nondecreasing_ = b >= 0.0;
    f.nonincreasing_ = b <= 0.0;
    // a + b*sqrt(s) is concave in s for b >= 0, convex for b <= 0.
    f.sqrt_concave_ = b >= 0.0;
    f.sqrt_convex_ = b <= 0.0;
    return f;
}

ScalarFunction ScalarFunction::chord(const ScalarFunction& base, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("chord function needs r > 0");
    ScalarFunction f;
    f.family_ = Family::Chord;
    f.r_ = r;
    f.base_ = std::make_shared<ScalarFunction>(base);
    f.nondecreasing_ = base.nondecreasing_ && base(r) >= 0.0;
    f.nonincreasing_ = false;
    // Splicing the chord through the origin preserves concavity of
    // f(sqrt(s)) when the base has it and base(0) >= 0.
    f.sqrt_concave_ = base.sqrt_concave_ && base(0.0) >= 0.0;
    f.sqrt_convex_ = false;
    return f;
}

ScalarFunction ScalarFunction::tabulated(std::vector<double> ts, std::vector<double> ys) {
    if (ts.size() != ys.size() || ts.size() < 2)
        throw std::invalid_argument("tabulated function needs >= 2 samples");
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (!(ts[i] > ts[i - 1]))
            throw std::invalid_argument("tabulated abscissae must increase");
    ScalarFunction f;
    f.family_ = Family::Tabulated;
    f.ts_ = std::move(ts);
    f.ys_ = std::move(ys);
    f.nondecreasing_ = true;
    for (std::size_t i = 1; i < f.ys_.size(); ++i)
        if (f.ys_[i] < f.ys_[i - 1]) f.nondecreasing_ = false;
    f.nonincreasing_ = true;
    for (std::size_t i = 1; i < f.ys_.size(); ++i)
        if (f.ys_[i] > f.ys_[i - 1]) f.nonincreasing_ = false;
    f.sqrt_convex_ = false;
    f.sqrt_concave_ = false;
    return f;
}

double ScalarFunction::operator()(double t) const {
    switch (family_) {
        case Family::Power:
            return std::pow(t, p_);
        case Family::Affine:
            return a_ + b_ * t;
        case Family::Chord:
            if (t >= r_) return (*base_)(t);
            return (t / r_) * (t / r_) * (*base_)(r_);
        case Family::Tabulated: {
            if (t <= ts_.front()) return ys_.front();
            if (t >= ts_.back()) return ys_.back();
            auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
            std::size_t i = static_cast<std::size_t>(it - ts_.begin());
            const double w = (t - ts_[i - 1]) / (ts_[i] - ts_[i - 1]);
            return ys_[i - 1] + w * (ys_[i] - ys_[i - 1]);
        }
    }
    return 0.0;
}

std::optional<std::string> ScalarFunction::spot_check(double lo, double hi) const {
    lo = std::max(lo, 0.0);
    if (hi <= lo) hi = lo + 1.0;
    const int n = 41;
    std::vector<double> fv(n), gv(n);
    double fmax = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = lo + (hi - lo) * i / (n - 1);
        const double s = lo * lo + (hi * hi - lo * lo) * i / (n - 1);
        fv[i] = (*this)(t);
        gv[i] = (*this)(std::sqrt(s));
        fmax = std::max(fmax, std::abs(fv[i]));
    }
    const double tol = 1e-9 * (1.0 + fmax);
    if (nondecreasing_)
        for (int i = 1; i < n; ++i)
            if (fv[i] < fv[i - 1] - tol)
                return "declared nondecreasing, but f decreases on the sampled range";
    if (nonincreasing_)
        for (int i = 1; i < n; ++i)
            if (fv[i] > fv[i - 1] + tol)
                return "declared nonincreasing, but f increases on the sampled range";
    if (sqrt_convex_)
        for (int i = 2; i < n; ++i)
            if (gv[i] - 2.0 * gv[i - 1] + gv[i - 2] < -tol)
                return "declared f(sqrt(t)) convex, but a second difference is negative";
    if (sqrt_concave_)
        for (int i = 2; i < n; ++i)
            if (gv[i] - 2.0 * gv[i - 1] + gv[i - 2] > tol)
                return "declared f(sqrt(t)) concave, but a second difference is positive";
    return std::nullopt;
}

std::string ScalarFunction::describe() const {
    std::ostringstream os;
    switch (family_) {
        case Family::Power:
            os << "pow:p=" << p_;
            break;
        case Family::Affine:
            os << "affine:a=" << a_ << ",b=" << b_;
            break;
        case Family::Chord:
            os << "chord:base=" << base_->describe() << ",r=" << r_;
            break;
        case Family::Tabulated:
            os << "tabulated[" << ts_.size() << " samples]";
            break;
    }
    return os.str();
}

namespace {

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad number in function spec: " + s);
    return v;
}

// key=value pairs separated by commas; value may not contain commas here.
std::vector<std::pair<std::string, std::string>> parse_kv(const std::string& s) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        const std::string item = s.substr(pos, comma - pos);
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected key=value in function spec: " + item);
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        pos = comma + 1;
    }
    return out;
}

}  // namespace

ScalarFunction parse_function_spec(const std::string& spec) {
    const std::size_t colon = spec.find(':');
    const std::string family = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);

    if (family == "pow") {
        for (const auto& [k, v] : parse_kv(rest))
            if (k == "p" || k == "q") return ScalarFunction::power(parse_double(v));
        throw std::invalid_argument("pow spec needs p=<exponent>");
    }
    if (family == "affine") {
        double a = 0.0, b = 1.0;
        for (const auto& [k, v] : parse_kv(rest)) {
            if (k == "a") a = parse_double(v);
            else if (k == "b") b = parse_double(v);
            else throw std::invalid_argument("affine spec: unknown key " + k);
        }
        return ScalarFunction::affine(a, b);
    }
    if (family == "chord") {
        // base=<spec> may itself contain ':' and '=', so split on the last
        // ",r=" instead of parsing generic pairs.
        const std::string base_key = "base=";
        if (rest.rfind(base_key, 0) != 0)
            throw std::invalid_argument("chord spec needs base=<spec>,r=<knee>");
        const std::size_t rpos = rest.rfind(",r=");
        if (rpos == std::string::npos)
            throw std::invalid_argument("chord spec needs a trailing r=<knee>");
        const std::string base_spec = rest.substr(base_key.size(), rpos - base_key.size());
        const double r = parse_double(rest.substr(rpos + 3));
        return ScalarFunction::chord(parse_function_spec(base_spec), r);
    }
    throw std::invalid_argument("unknown function family: " + family);
}

}  // namespace blockpythag
