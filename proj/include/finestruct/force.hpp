#pragma once

#include <finestruct/real.hpp>

#include <stdexcept>
#include <string>

namespace finestruct {

enum class ForceKind { zero, constant, linear, power };

// External force description. The amplitude is kept as a decimal string so a
// model can be materialized at any precision later without inheriting
// rounding from the scope that created it.
struct ForceModel {
    ForceKind kind = ForceKind::zero;
    std::string amplitude = "0";  // F for constant, alpha for linear/power
    int exponent = 0;             // n for power
};

namespace detail {

inline Real parse_amplitude(const std::string& text, const char* what) {
    Real v;
    try {
        v = Real(text);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string(what) + ": bad decimal literal '" + text + "'");
    }
    if (mpfr_number_p(v.backend().data()) == 0)
        throw std::invalid_argument(std::string(what) + ": amplitude must be finite");
    return v;
}

}  // namespace detail

inline ForceModel zero_force() { return ForceModel{}; }

inline ForceModel constant_force(const std::string& F) {
    if (detail::parse_amplitude(F, "constant_force") < 0)
        throw std::invalid_argument("constant_force: need F >= 0");
    return ForceModel{ForceKind::constant, F, 0};
}

inline ForceModel linear_force(const std::string& alpha) {
    if (detail::parse_amplitude(alpha, "linear_force") <= 0)
        throw std::invalid_argument("linear_force: need alpha > 0");
    return ForceModel{ForceKind::linear, alpha, 0};
}

inline ForceModel power_force(const std::string& alpha, int n) {
    if (detail::parse_amplitude(alpha, "power_force") <= 0)
        throw std::invalid_argument("power_force: need alpha > 0");
    if (n < 2)
        throw std::invalid_argument("power_force: need exponent n >= 2");
    return ForceModel{ForceKind::power, alpha, n};
}

// Forms: "zero" | "const:F" | "linear:alpha" | "power:alpha:n"
inline ForceModel parse_force(const std::string& text) {
    auto piece = [&](std::size_t from, std::size_t to) { return text.substr(from, to - from); };
    std::size_t c1 = text.find(':');
    std::string head = piece(0, c1 == std::string::npos ? text.size() : c1);
    if (head == "zero") {
        if (c1 != std::string::npos)
            throw std::invalid_argument("parse_force: 'zero' takes no parameters");
        return zero_force();
    }
    if (c1 == std::string::npos)
        throw std::invalid_argument("parse_force: missing amplitude in '" + text + "'");
    std::size_t c2 = text.find(':', c1 + 1);
    if (head == "const" || head == "linear") {
        if (c2 != std::string::npos)
            throw std::invalid_argument("parse_force: too many parameters in '" + text + "'");
        std::string amp = piece(c1 + 1, text.size());
        return head == "const" ? constant_force(amp) : linear_force(amp);
    }
    if (head == "power") {
        if (c2 == std::string::npos)
            throw std::invalid_argument("parse_force: 'power' needs alpha and n");
        std::string amp = piece(c1 + 1, c2);
        std::string ntext = piece(c2 + 1, text.size());
        std::size_t used = 0;
        int n = 0;
        try {
            n = std::stoi(ntext, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("parse_force: bad exponent '" + ntext + "'");
        }
        if (used != ntext.size())
            throw std::invalid_argument("parse_force: bad exponent '" + ntext + "'");
        return power_force(amp, n);
    }
    throw std::invalid_argument("parse_force: unknown force kind '" + head + "'");
}

inline std::string format_force(const ForceModel& model) {
    switch (model.kind) {
        case ForceKind::zero:
            return "zero";
        case ForceKind::constant:
            return "const:" + model.amplitude;
        case ForceKind::linear:
            return "linear:" + model.amplitude;
        case ForceKind::power:
            return "power:" + model.amplitude + ":" + std::to_string(model.exponent);
    }
    throw std::logic_error("format_force: corrupt kind");
}

// Model with its amplitude realized at the precision active at construction
// time. Both F and F' are monotone non-decreasing and non-negative on [0,1]
// for every accepted model.
class ForceEval {
  public:
    explicit ForceEval(const ForceModel& model)
        : kind_(model.kind),
          amp_(detail::parse_amplitude(model.amplitude, "ForceEval")),
          n_(model.exponent) {
        switch (kind_) {
            case ForceKind::zero:
                break;
            case ForceKind::constant:
                if (amp_ < 0)
                    throw std::invalid_argument("ForceEval: need F >= 0");
                break;
            case ForceKind::linear:
            case ForceKind::power:
                if (amp_ <= 0)
                    throw std::invalid_argument("ForceEval: need alpha > 0");
                if (kind_ == ForceKind::power && n_ < 2)
                    throw std::invalid_argument("ForceEval: need exponent n >= 2");
                break;
        }
    }

    ForceKind kind() const { return kind_; }
    const Real& amplitude() const { return amp_; }
    int exponent() const { return n_; }
    bool is_zero() const {
        return kind_ == ForceKind::zero || (kind_ == ForceKind::constant && amp_ == 0);
    }

    Real value(const Real& x) const {
        switch (kind_) {
            case ForceKind::zero:
                return Real(0);
            case ForceKind::constant:
                return amp_;
            case ForceKind::linear:
                return amp_ * x;
            case ForceKind::power:
                return amp_ * pow(x, n_);
        }
        throw std::logic_error("ForceEval: corrupt kind");
    }

    Real deriv(const Real& x) const {
        switch (kind_) {
            case ForceKind::zero:
            case ForceKind::constant:
                return Real(0);
            case ForceKind::linear:
                return amp_;
            case ForceKind::power:
                return amp_ * n_ * pow(x, n_ - 1);
        }
        throw std::logic_error("ForceEval: corrupt kind");
    }

  private:
    ForceKind kind_;
    Real amp_;
    int n_;
};

}  // namespace finestruct
