#include "kaclab/coeffs.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace kaclab::coeffs {

namespace {

std::string format_param(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", p);
    return buf;
}

}  // namespace

std::complex<double> CoefficientLaw::sample(RngStream& stream) const {
    switch (kind) {
        case LawKind::GaussianComplex:
            return stream.next_complex_normal();
        case LawKind::GaussianReal:
            return {stream.next_normal(), 0.0};
        case LawKind::Rademacher:
            return {(stream.next_u64() >> 63) ? 1.0 : -1.0, 0.0};
        case LawKind::UniformReal:
            // Uniform on [-sqrt(3), sqrt(3)]: variance 1.
            return {(2.0 * stream.next_unit() - 1.0) * 1.7320508075688772935, 0.0};
        case LawKind::TwoPoint: {
            // a = sqrt((1-p)/p) w.p. p, b = -sqrt(p/(1-p)) w.p. 1-p.
            double a = std::sqrt((1.0 - p) / p);
            double b = -std::sqrt(p / (1.0 - p));
            return {stream.next_unit() < p ? a : b, 0.0};
        }
    }
    throw std::logic_error("unreachable law kind");
}

CoefficientLaw make_law(const std::string& kind, std::optional<double> p) {
    CoefficientLaw law{};
    if (kind == "gaussian-complex") {
        law.kind = LawKind::GaussianComplex;
        law.is_complex = true;
        law.pseudo_moment = 0.0;
        law.fourth_abs_moment = 2.0;
        law.id = kind;
    } else if (kind == "gaussian-real") {
        law.kind = LawKind::GaussianReal;
        law.is_complex = false;
        law.pseudo_moment = 1.0;
        law.fourth_abs_moment = 3.0;
        law.id = kind;
    } else if (kind == "rademacher") {
        law.kind = LawKind::Rademacher;
        law.is_complex = false;
        law.pseudo_moment = 1.0;
        law.fourth_abs_moment = 1.0;
        law.id = kind;
    } else if (kind == "uniform-real") {
        law.kind = LawKind::UniformReal;
        law.is_complex = false;
        law.pseudo_moment = 1.0;
        law.fourth_abs_moment = 1.8;  // E[x^4] = a^4/5 with a^2 = 3
        law.id = kind;
    } else if (kind == "two-point") {
        if (!p.has_value()) {
            throw std::invalid_argument("two-point law requires parameter p");
        }
        double pp = *p;
        if (!(pp > 0.0 && pp < 1.0)) {
            throw std::invalid_argument("two-point parameter p must lie in (0,1)");
        }
        law.kind = LawKind::TwoPoint;
        law.is_complex = false;
        law.pseudo_moment = 1.0;
        double q = 1.0 - pp;
        law.fourth_abs_moment = q * q / pp + pp * pp / q;
        law.p = pp;
        law.id = "two-point(" + format_param(pp) + ")";
    } else {
        throw std::invalid_argument("unknown coefficient law: " + kind);
    }
    return law;
}

CoefficientLaw parse_law(const std::string& id) {
    auto open = id.find('(');
    if (open == std::string::npos) {
        return make_law(id);
    }
    if (id.back() != ')') {
        throw std::invalid_argument("malformed law id: " + id);
    }
    std::string name = id.substr(0, open);
    std::string arg = id.substr(open + 1, id.size() - open - 2);
    std::size_t used = 0;
    double p = std::stod(arg, &used);
    if (used != arg.size()) {
        throw std::invalid_argument("malformed law parameter: " + id);
    }
    return make_law(name, p);
}

std::vector<std::complex<double>> sample_coeffs(const CoefficientLaw& law, int n,
                                                RngStream& stream) {
    if (n < 1) throw std::invalid_argument("sample_coeffs requires n >= 1");
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n) + 1);
    for (auto& c : out) c = law.sample(stream);
    return out;
}

}  // namespace kaclab::coeffs
