// Derive the electrostatic parameters of the default two-qubit device.
#include <cstdio>

#include "qdsim/auxcaps.hpp"
#include "qdsim/geometry.hpp"
#include "qdsim/units.hpp"

int main() {
    qd::DeviceGeometry g;
    const qd::CapacitanceSet caps = qd::caps_from_geometry(g);
    const qd::AuxCaps a = qd::derive_aux(caps, 0);
    const qd::AuxCaps b = qd::derive_aux(caps, 1);
    std::printf("C_A = %.4f aF  C_B = %.4f aF  C_C = %.4f aF  C_D = %.4f aF\n",
                caps.cA[0], caps.cB[0], caps.cC[0], caps.cD[0]);
    std::printf("E_C = %.3f meV\n", qd::charging_energy(a));
    std::printf("J   = %.4f meV exact, %.4f meV truncated\n",
                qd::coupling_j(a, b), qd::coupling_j_truncated(a, b));
    std::printf("1/(RC) = %.3f THz at R = 1 Mohm, C = C_B\n",
                qd::units::inv_rc_thz(1.0e6, caps.cB[0]));
    return 0;
}
