#ifndef VHSIM_ADDRESS_HPP
#define VHSIM_ADDRESS_HPP

#include <compare>
#include <cstdint>
#include <string>

namespace vhsim {

// 48-bit link-layer address, rendered as aa:bb:cc:dd:ee:ff.
struct MacAddress {
    std::uint64_t bits = 0; // low 48 bits only

    friend auto operator<=>(const MacAddress&, const MacAddress&) = default;

    std::string to_string() const;
    static MacAddress parse(const std::string& text); // throws std::invalid_argument
};

// 32-bit address plus subnet prefix length, rendered as a.b.c.d/len.
struct IpAddress {
    std::uint32_t addr = 0;
    std::uint8_t prefix_len = 24;

    friend auto operator<=>(const IpAddress&, const IpAddress&) = default;

    // Flow matching compares the 32-bit address only; the prefix is
    // configuration metadata.
    bool same_host(const IpAddress& other) const { return addr == other.addr; }

    std::string to_string() const;
    std::string host_string() const; // dotted quad without the prefix
    static IpAddress parse(const std::string& text); // throws std::invalid_argument
};

} // namespace vhsim

#endif
