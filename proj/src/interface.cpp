#include "vhsim/interface.hpp"

namespace vhsim {

const char* kind_name(InterfaceKind k)
{
    return k == InterfaceKind::WiFi ? "wifi" : "bluetooth";
}

const char* state_name(InterfaceState s)
{
    switch (s) {
    case InterfaceState::Off: return "off";
    case InterfaceState::WakingUp: return "waking_up";
    case InterfaceState::Sleep: return "sleep";
    case InterfaceState::Active: return "active";
    }
    return "?";
}

bool transition_allowed(InterfaceState from, InterfaceState to)
{
    if (to == InterfaceState::Off)
        return true; // any state may be switched off
    switch (from) {
    case InterfaceState::Off: return to == InterfaceState::WakingUp;
    case InterfaceState::WakingUp: return to == InterfaceState::Sleep;
    case InterfaceState::Sleep: return to == InterfaceState::Active;
    case InterfaceState::Active: return to == InterfaceState::Sleep;
    }
    return false;
}

} // namespace vhsim
