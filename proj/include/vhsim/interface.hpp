#ifndef VHSIM_INTERFACE_HPP
#define VHSIM_INTERFACE_HPP

#include <string>

#include "vhsim/address.hpp"

namespace vhsim {

// The two access technologies every device carries.
enum class InterfaceKind { WiFi, Bluetooth };

// Lifecycle states of a wireless interface.
// Legal transitions: Off->WakingUp->Sleep<->Active, and any->Off.
enum class InterfaceState { Off, WakingUp, Sleep, Active };

const char* kind_name(InterfaceKind k);
const char* state_name(InterfaceState s);

bool transition_allowed(InterfaceState from, InterfaceState to);

// MAC/IP pair carried by one interface (or by the virtual endpoint).
struct InterfaceAddr {
    MacAddress mac;
    IpAddress ip;
};

} // namespace vhsim

#endif
