#pragma once

// One 4x1 m space (ifc:100) cut into four 1 m cells and one sensor, with an
// occupant that moves from the first cell to the last between two windows.
//
// Dense node order: ifc:100=0, cell:100:0:0..3 = 1..4, sensor:1=5, occ:1=6.

#include <vector>

#include "b2v/space_grid.hpp"
#include "b2v/temporal.hpp"

namespace fixtures {

struct MoveFixture {
  b2v::PropertyGraph base;
  std::vector<b2v::DiscretizedSpace> spaces;
  std::vector<b2v::OccupantFix> fixes;
  b2v::TemporalConfig cfg;
};

inline MoveFixture occupant_move(bool with_sensor = false) {
  using namespace b2v;
  MoveFixture f;
  const NodeId space = NodeId::ifc(100);
  f.base.add_node(space, "IFCSPACE");
  f.spaces.push_back(discretize({space, {{0, 0}, {4, 0}, {4, 1}, {0, 1}}, 0}, 1.0));
  merge_space(f.base, f.spaces[0]);
  if (with_sensor) attach_sensors(f.base, f.spaces, {{NodeId::sensor(1), space, {2.5, 0.5}}}, 0.5);
  f.fixes = {{NodeId::occupant(1), 0, space, {0.5, 0.5}, std::nullopt},
             {NodeId::occupant(1), 60, space, {3.5, 0.5}, std::nullopt}};
  f.cfg.step = 60;
  f.cfg.occupant_radius = 0.5;  // the containing cell only
  return f;
}

}  // namespace fixtures
