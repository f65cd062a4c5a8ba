#pragma once

#include "greycone/dut.hpp"

namespace greycone {

// Builds p.blocks from p.body. Unreachable blocks are dropped and the
// survivors renumbered densely in creation order, so block 0 is the entry.
void lower_to_cfg(Program& p);

}  // namespace greycone
