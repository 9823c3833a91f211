#ifndef VHSIM_PACKET_HPP
#define VHSIM_PACKET_HPP

#include <cstdint>
#include <string>

#include "vhsim/address.hpp"
#include "vhsim/interface.hpp"
#include "vhsim/sim_time.hpp"

namespace vhsim {

enum class Protocol { ARP, ICMP, TCP, UDP };

const char* protocol_name(Protocol p);

// Minimal UDP-in-Ethernet framing; packets below this are rejected.
constexpr std::uint32_t kMinPacketBytes = 42;

// Simulated frame. payload_id stands in for payload bytes: it is the
// packet's identity and survives any number of header rewrites.
struct Packet {
    MacAddress src_mac;
    MacAddress dst_mac;
    IpAddress src_ip;
    IpAddress dst_ip;
    Protocol protocol = Protocol::UDP;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint64_t payload_id = 0;
    std::uint32_t size_bytes = kMinPacketBytes;
    SimTime sent_at;

    std::string to_string() const;
};

// Allocator for fresh payload identities, one per scenario.
class PayloadIdSource {
public:
    std::uint64_t fresh() { return next_++; }

private:
    std::uint64_t next_ = 1;
};

// Builds a UDP packet with headers copied from the endpoint descriptors.
// Throws std::invalid_argument when size_bytes < kMinPacketBytes.
Packet make_udp_packet(const InterfaceAddr& src, const InterfaceAddr& dst,
                       std::uint32_t size_bytes, SimTime sent_at,
                       PayloadIdSource& ids,
                       std::uint16_t src_port = 0, std::uint16_t dst_port = 0);

// Returns a copy of p differing only in the four named header fields.
Packet rewrite_headers(const Packet& p, MacAddress new_src_mac, MacAddress new_dst_mac,
                       IpAddress new_src_ip, IpAddress new_dst_ip);

} // namespace vhsim

#endif
