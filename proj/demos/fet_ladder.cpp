// Solve the readout FET chain and print the node-voltage ladder.
#include <cstdio>

#include "qdsim/readout.hpp"

int main() {
    const qd::FetChainProblem prob = qd::uniform_chain(8, 2.0, 0.3, 1.5);
    const qd::ChainSolution sol = qd::solve_chain(prob);
    std::printf("current = %.6f (lambda V^2 units)\n", sol.current);
    for (std::size_t i = 0; i < sol.v_nodes.size(); ++i)
        std::printf("node %zu: %.6f V\n", i, sol.v_nodes[i]);
    return 0;
}
