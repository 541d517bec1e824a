#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sketchmap/arch.hpp"
#include "sketchmap/ir.hpp"

namespace sketchmap {

struct TemplateParam {
  std::string name;
  std::uint32_t min = 0;
  std::uint32_t max = 0;
  std::string help;
};

struct TemplateInfo {
  std::string name;
  std::string summary;
  std::vector<TemplateParam> params;
};

/// The five templates in a fixed order: dsp, bitwise, bitwise-with-carry, comparison, multiplication.
const std::vector<TemplateInfo>& list_templates();

struct TemplateRequest {
  std::string name;
  /// Design inputs, in operand order; each becomes a variable of the sketch.
  std::vector<std::pair<std::string, std::uint32_t>> inputs;
  /// Data width; the result is `width` bits wide except for comparison (1 bit).
  std::uint32_t width = 8;
  /// Only meaningful for dsp, where it is checked against 0..3.
  std::uint32_t pipeline_depth = 0;
};

/// Specializes a template for `desc`. Every interface instance goes through
/// lower_interface + realize, so hole labels are unique per instance.
/// Throws NoImplementation, ArityError (too many operands), or Error for an unknown
/// template or bad parameters.
Sketch generate_sketch(const TemplateRequest& request, const ArchDescription& desc);

}  // namespace sketchmap
