#pragma once

#include <span>
#include <vector>

#include "gridfusion/fusion.hpp"
#include "gridfusion/projection.hpp"

namespace gridfusion::serial {

/// Serial counterparts of the parallel kernels, kept as the reference the
/// parallel implementations are tested against. fuse_frame is a plain
/// brute-force double loop with the band arithmetic inlined rather than
/// shared, so the two routes stay independent.

std::vector<ProjectedPoint> project_frame(std::span<const GridPoint> points,
                                          const CameraCalibration& calib);

std::vector<RegionAssignment> fuse_frame(std::span<const BoundingBox2D> detections,
                                         std::span<const ProjectedPoint> points);

std::vector<FusedObject> extract_objects(std::span<const RegionAssignment> assignments,
                                         int frame_id);

}  // namespace gridfusion::serial
