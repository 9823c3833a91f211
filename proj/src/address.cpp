#include "vhsim/address.hpp"

#include <cstdio>
#include <stdexcept>

namespace vhsim {

std::string MacAddress::to_string() const
{
    char buf[18];
    std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x",
                  unsigned((bits >> 40) & 0xff), unsigned((bits >> 32) & 0xff),
                  unsigned((bits >> 24) & 0xff), unsigned((bits >> 16) & 0xff),
                  unsigned((bits >> 8) & 0xff), unsigned(bits & 0xff));
    return buf;
}

MacAddress MacAddress::parse(const std::string& text)
{
    unsigned b[6];
    char tail = 0;
    int n = std::sscanf(text.c_str(), "%x:%x:%x:%x:%x:%x%c",
                        &b[0], &b[1], &b[2], &b[3], &b[4], &b[5], &tail);
    if (n != 6)
        throw std::invalid_argument("bad MAC address: " + text);
    std::uint64_t bits = 0;
    for (unsigned v : b) {
        if (v > 0xff)
            throw std::invalid_argument("bad MAC address: " + text);
        bits = (bits << 8) | v;
    }
    return MacAddress{bits};
}

std::string IpAddress::to_string() const
{
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u/%u",
                  (addr >> 24) & 0xff, (addr >> 16) & 0xff,
                  (addr >> 8) & 0xff, addr & 0xff, unsigned(prefix_len));
    return buf;
}

std::string IpAddress::host_string() const
{
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u",
                  (addr >> 24) & 0xff, (addr >> 16) & 0xff,
                  (addr >> 8) & 0xff, addr & 0xff);
    return buf;
}

IpAddress IpAddress::parse(const std::string& text)
{
    unsigned a, b, c, d, len = 24;
    char tail = 0;
    int n = std::sscanf(text.c_str(), "%u.%u.%u.%u/%u%c", &a, &b, &c, &d, &len, &tail);
    if (n != 4 && n != 5)
        throw std::invalid_argument("bad IP address: " + text);
    if (a > 255 || b > 255 || c > 255 || d > 255 || len > 32)
        throw std::invalid_argument("bad IP address: " + text);
    return IpAddress{(a << 24) | (b << 16) | (c << 8) | d, static_cast<std::uint8_t>(len)};
}

} // namespace vhsim
