#include "vassavg/numeric.hpp"

#include <cctype>
#include <sstream>

namespace vass {

std::optional<Rat> parse_rat(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const auto slash = text.find('/');
    const auto is_int = [](const std::string& s) {
        if (s.empty()) return false;
        size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    };
    try {
        if (slash == std::string::npos) {
            if (!is_int(text)) return std::nullopt;
            return Rat(Int(text));
        }
        const std::string num = text.substr(0, slash);
        const std::string den = text.substr(slash + 1);
        if (!is_int(num) || !is_int(den)) return std::nullopt;
        Int d(den);
        if (d == 0) return std::nullopt;
        return make_rat(Int(num), std::move(d));
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

std::string vec_string(const IntVec& v) {
    std::ostringstream out;
    out << "(";
    for (Index i = 0; i < v.size(); ++i) {
        if (i) out << ", ";
        out << v(i);
    }
    out << ")";
    return out.str();
}

}  // namespace vass
