#include "vhsim/packet.hpp"

#include <stdexcept>

namespace vhsim {

const char* protocol_name(Protocol p)
{
    switch (p) {
    case Protocol::ARP: return "arp";
    case Protocol::ICMP: return "icmp";
    case Protocol::TCP: return "tcp";
    case Protocol::UDP: return "udp";
    }
    return "?";
}

std::string Packet::to_string() const
{
    return std::string(protocol_name(protocol)) + " " + src_ip.to_string() + ":" +
           std::to_string(src_port) + " -> " + dst_ip.to_string() + ":" +
           std::to_string(dst_port) + " payload=" + std::to_string(payload_id) +
           " size=" + std::to_string(size_bytes);
}

Packet make_udp_packet(const InterfaceAddr& src, const InterfaceAddr& dst,
                       std::uint32_t size_bytes, SimTime sent_at,
                       PayloadIdSource& ids,
                       std::uint16_t src_port, std::uint16_t dst_port)
{
    if (size_bytes < kMinPacketBytes)
        throw std::invalid_argument("packet below " + std::to_string(kMinPacketBytes) +
                                    "-byte header minimum");
    Packet p;
    p.src_mac = src.mac;
    p.dst_mac = dst.mac;
    p.src_ip = src.ip;
    p.dst_ip = dst.ip;
    p.protocol = Protocol::UDP;
    p.src_port = src_port;
    p.dst_port = dst_port;
    p.payload_id = ids.fresh();
    p.size_bytes = size_bytes;
    p.sent_at = sent_at;
    return p;
}

Packet rewrite_headers(const Packet& p, MacAddress new_src_mac, MacAddress new_dst_mac,
                       IpAddress new_src_ip, IpAddress new_dst_ip)
{
    Packet out = p;
    out.src_mac = new_src_mac;
    out.dst_mac = new_dst_mac;
    out.src_ip = new_src_ip;
    out.dst_ip = new_dst_ip;
    return out;
}

} // namespace vhsim
