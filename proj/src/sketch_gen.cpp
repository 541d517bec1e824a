#include "sketchmap/sketch_gen.hpp"

#include <algorithm>

#include "sketchmap/errors.hpp"
#include "sketchmap/well_formed.hpp"

namespace sketchmap {

const std::vector<TemplateInfo>& list_templates() {
  static const std::vector<TemplateInfo> templates = {
      {"dsp",
       "one DSP instance; every data port picks a design input or zero, configuration is solved",
       {{"width", 1, 64, "data width"}, {"pipeline-depth", 0, 3, "register stages of the design"},
        {"operand-count", 1, 4, "design inputs routed to the DSP"}}},
      {"bitwise",
       "one LUT per output bit, fed the same bit of every operand",
       {{"width", 1, 64, "data width"}, {"operand-count", 1, 6, "operands per LUT"}}},
      {"bitwise-with-carry",
       "per-bit LUT pair driving the select and data inputs of a carry chain",
       {{"width", 1, 64, "data width"}, {"operand-count", 1, 6, "operands per LUT"}}},
      {"comparison",
       "bitwise-with-carry whose carry out passes through a final 1-input LUT",
       {{"width", 1, 64, "operand width"}, {"operand-count", 2, 2, "always two"}}},
      {"multiplication",
       "shift-add array: partial-product LUTs summed row by row through carry chains",
       {{"width", 1, 64, "operand and product width"}, {"operand-count", 2, 2, "always two"}}},
  };
  return templates;
}

namespace {

class Generator {
 public:
  Generator(const TemplateRequest& req, const ArchDescription& desc) : req_(req), desc_(desc), b_(ids_) {
    if (req.width == 0 || req.width > BitVec::kMaxWidth) throw Error("template width must be between 1 and 64");
    for (const auto& [name, w] : req.inputs) {
      if (w == 0 || w > req.width) {
        throw WidthError("input " + name + " is " + std::to_string(w) + " bits; the template width is " +
                         std::to_string(req.width));
      }
      inputs_.push_back(b_.var(name, w));
      // Narrow inputs are zero-extended to the template width.
      padded_.push_back(w == req.width ? inputs_.back() : b_.op(Operator::zero_extend(req.width - w), {inputs_.back()}));
    }
  }

  Sketch run() {
    const std::string& t = req_.name;
    Id root = 0;
    if (t == "bitwise") {
      root = bitwise();
    } else if (t == "bitwise-with-carry") {
      root = bitwise_with_carry();
    } else if (t == "comparison") {
      root = comparison();
    } else if (t == "multiplication") {
      root = multiplication();
    } else if (t == "dsp") {
      root = dsp();
    } else {
      throw Error("unknown template '" + t + "'");
    }
    sketch_.psi = b_.build(root);
    check_well_formed(sketch_.psi);
    return std::move(sketch_);
  }

 private:
  const TemplateRequest& req_;
  const ArchDescription& desc_;
  IdAllocator ids_{1};
  ProgBuilder b_;
  Sketch sketch_;
  std::vector<Id> inputs_;
  std::vector<Id> padded_;

  Id bit(Id x, std::uint32_t i) { return b_.op(Operator::extract(i, i), {x}); }

  Id concat_lsb_first(const std::vector<Id>& bits) {
    if (bits.size() == 1) return bits[0];
    return b_.op(OpKind::Concat, std::vector<Id>(bits.rbegin(), bits.rend()));
  }

  void require_operands(std::size_t lo, std::size_t hi) {
    if (req_.inputs.size() < lo || req_.inputs.size() > hi) {
      throw ArityError(req_.name + " takes " + (lo == hi ? std::to_string(lo) : std::to_string(lo) + " to " + std::to_string(hi)) +
                       " operands, got " + std::to_string(req_.inputs.size()));
    }
  }

  /// Plan for LUT(k); an arity no lowering chain reaches is an arity error when the fabric has LUTs at all.
  LoweringPlan lut_plan(std::uint32_t k) {
    try {
      if (k > 6) throw NoImplementation("LUT" + std::to_string(k));
      return lower_interface(lut_interface(k), desc_);
    } catch (const NoImplementation&) {
      if (!desc_.implemented_sizes(InterfaceKind::LUT).empty()) {
        throw ArityError(std::to_string(k) + " operands exceed the LUT inputs available on this architecture");
      }
      throw;
    }
  }

  Id lut(const LoweringPlan& plan, const std::vector<Id>& ins, const std::string& prefix) {
    std::map<std::string, Id> in;
    for (std::size_t k = 0; k < ins.size(); ++k) in["I" + std::to_string(k)] = ins[k];
    return realize(plan, in, b_, prefix, sketch_).at("O");
  }

  /// Bit i of every operand.
  std::vector<Id> column(std::uint32_t i) {
    std::vector<Id> out;
    for (Id x : padded_) out.push_back(bit(x, i));
    return out;
  }

  Id bitwise() {
    require_operands(1, 6);
    auto plan = lut_plan(static_cast<std::uint32_t>(inputs_.size()));
    std::vector<Id> out;
    for (std::uint32_t i = 0; i < req_.width; ++i) out.push_back(lut(plan, column(i), "b" + std::to_string(i) + "_"));
    return concat_lsb_first(out);
  }

  /// LUT pairs -> CARRY(width); returns {O, CO}.
  std::pair<Id, Id> carry_sum(const std::string& prefix) {
    auto plan = lut_plan(static_cast<std::uint32_t>(inputs_.size()));
    std::vector<Id> s, di;
    for (std::uint32_t i = 0; i < req_.width; ++i) {
      auto col = column(i);
      s.push_back(lut(plan, col, prefix + "s" + std::to_string(i) + "_"));
      di.push_back(lut(plan, col, prefix + "d" + std::to_string(i) + "_"));
    }
    std::string ci_label = prefix + "ci";
    sketch_.holes[ci_label] = ConstantHole{1};
    Id ci = b_.add(HoleNode{ci_label, ConstantHole{1}});
    auto outs = realize(lower_interface(carry_interface(req_.width), desc_),
                        {{"S", concat_lsb_first(s)}, {"DI", concat_lsb_first(di)}, {"CI", ci}}, b_, prefix + "carry_",
                        sketch_);
    return {outs.at("O"), outs.at("CO")};
  }

  Id bitwise_with_carry() {
    require_operands(1, 6);
    return carry_sum("").first;
  }

  Id comparison() {
    require_operands(2, 2);
    Id co = carry_sum("").second;
    return lut(lut_plan(1), {co}, "post_");
  }

  Id multiplication() {
    require_operands(2, 2);
    const std::uint32_t w = req_.width;
    Id a = padded_[0];
    Id bb = padded_[1];
    // Row 0: a_i & b_0 through 2-input LUTs.
    auto lut2 = lut_plan(2);
    std::vector<Id> acc;
    for (std::uint32_t i = 0; i < w; ++i) acc.push_back(lut(lut2, {bit(a, i), bit(bb, 0)}, "r0_b" + std::to_string(i) + "_"));
    // Row j adds (a & b_j) << j into bits j..w-1; the partial-product AND folds into the LUTs driving the chain.
    auto lut3 = w > 1 ? lut_plan(3) : lut2;
    for (std::uint32_t j = 1; j < w; ++j) {
      const std::uint32_t cw = w - j;
      std::vector<Id> s, di;
      for (std::uint32_t i = j; i < w; ++i) {
        std::vector<Id> ins{acc[i], bit(a, i - j), bit(bb, j)};
        std::string p = "r" + std::to_string(j) + "_b" + std::to_string(i) + "_";
        s.push_back(lut(lut3, ins, p + "s_"));
        di.push_back(lut(lut3, ins, p + "d_"));
      }
      auto outs = realize(lower_interface(carry_interface(cw), desc_),
                          {{"S", concat_lsb_first(s)}, {"DI", concat_lsb_first(di)}, {"CI", b_.bv(BitVec(1, 0))}}, b_,
                          "r" + std::to_string(j) + "_carry_", sketch_);
      Id o = outs.at("O");
      for (std::uint32_t i = j; i < w; ++i) acc[i] = cw == 1 ? o : bit(o, i - j);
    }
    return concat_lsb_first(acc);
  }

  Id dsp() {
    require_operands(1, 4);
    if (req_.pipeline_depth > 3) throw Error("dsp pipeline depth must be 0..3");
    const std::uint32_t w = req_.width;
    auto plan = lower_interface(dsp_interface(w), desc_);
    // Each data port selects one design input or zero.
    std::map<std::string, Id> ports;
    for (const char* port : {"A", "B", "C", "D"}) {
      ChoiceHole choice;
      for (Id x : padded_) choice.alternatives.push_back(OpNode{Operator::extract(w - 1, 0), {x}});
      choice.alternatives.push_back(BvNode{BitVec::zero(w)});
      std::string label = std::string("route_") + port;
      sketch_.holes[label] = choice;
      ports[port] = b_.add(HoleNode{label, choice});
    }
    return realize(plan, ports, b_, "dsp_", sketch_).at("out");
  }
};

}  // namespace

Sketch generate_sketch(const TemplateRequest& request, const ArchDescription& desc) {
  return Generator(request, desc).run();
}

}  // namespace sketchmap
