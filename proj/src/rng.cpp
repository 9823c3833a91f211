#include "vhsim/rng.hpp"

#include <cstdio>
#include <sstream>

namespace vhsim {

namespace {

std::string fmt_num(double v)
{
    // %.17g keeps serialize->parse exact for round-trip equality.
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string Distribution::to_string() const
{
    switch (kind) {
    case Kind::Constant: return "const " + fmt_num(a);
    case Kind::Uniform: return "uniform " + fmt_num(a) + " " + fmt_num(b);
    case Kind::Exponential: return "exp " + fmt_num(a);
    case Kind::ConfigRatio: return "config_ratio " + fmt_num(a);
    }
    return "";
}

Distribution Distribution::parse(const std::string& text)
{
    std::istringstream in(text);
    std::string word;
    if (!(in >> word))
        throw std::invalid_argument("empty distribution");
    Distribution d;
    auto need = [&](double& slot) {
        if (!(in >> slot))
            throw std::invalid_argument("distribution '" + text + "': missing parameter");
    };
    if (word == "const") {
        d.kind = Kind::Constant;
        need(d.a);
    } else if (word == "uniform") {
        d.kind = Kind::Uniform;
        need(d.a);
        need(d.b);
        if (d.b < d.a)
            throw std::invalid_argument("uniform bounds out of order: " + text);
    } else if (word == "exp") {
        d.kind = Kind::Exponential;
        need(d.a);
        if (d.a <= 0)
            throw std::invalid_argument("exponential mean must be positive: " + text);
    } else if (word == "config_ratio") {
        d.kind = Kind::ConfigRatio;
        need(d.a);
        if (d.a <= 0)
            throw std::invalid_argument("config_ratio must be positive: " + text);
    } else {
        throw std::invalid_argument("unknown distribution kind '" + word + "'");
    }
    std::string extra;
    if (in >> extra)
        throw std::invalid_argument("trailing tokens in distribution: " + text);
    return d;
}

} // namespace vhsim
