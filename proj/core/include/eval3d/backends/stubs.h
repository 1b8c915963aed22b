#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "eval3d/common/grid.h"

namespace eval3d {

// Deterministic test doubles for every backend kind, driven by a script
// object keyed by kind name. Modes (defaults first):
//   depth:      echo (copies inputs.reference_depth) | affine {scale, shift}
//               | disparity (1/depth on valid pixels)
//   features:   constant {channels, value} | per_view {channels,
//               values: {"<view_id>": [C floats]}}
//   nvs:        reference (returns inputs.reference_target)
//   perceptual: ncc (1 - normalized cross-correlation of grayscale, clamped
//               to [0,1]) | table {table: {"<tag>": distance}} | constant
//   qagen:      template (one yes/no question per prompt) | table
//               {table: {"<prompt>": [QAItem...]}}
//   vqa:        constant {answer} | table {table: {"<view_id>|<question>":
//               answer}, default?}
//   aesthetic:  constant {value} | per_view {values: {"<view_id>": score}}
//   pairwise:   rank {ranks: {"<model>": rank}} (lower rank wins) |
//               table {table: {"<a>|<b>": "a"|"b"|"tie"}}
// Scripted lookups that miss are errors.
//
// Reads <job_dir>/request.json and writes response.json plus outputs.
// Failures are reported as a status:error response; returns the process
// exit code a standalone backend would use (0 ok, 1 error).
int ServeStubJob(const nlohmann::json& script,
                 const std::filesystem::path& job_dir);

// Script with every kind in its default mode (constant features,
// all-"Yes" VQA, constant aesthetic score).
nlohmann::json DefaultStubScript();

// 1 - NCC of the luma channels, clamped to [0,1]. Zero-variance images
// score 0 when identical and 1 otherwise.
double NccDistance(const RgbImage& a, const RgbImage& b);

}  // namespace eval3d
