#include "vhsim/device.hpp"

#include <stdexcept>
#include <string>

namespace vhsim {

void Device::set_state(InterfaceKind k, InterfaceState to, SimTime at)
{
    InterfaceRuntime& i = iface(k);
    if (i.state == to)
        return;
    if (!transition_allowed(i.state, to))
        throw std::logic_error(id + "/" + kind_name(k) + ": illegal transition "
                               + state_name(i.state) + " -> " + state_name(to));
    i.state = to;
    state_log.push_back({at, k, to});
}

} // namespace vhsim
