#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ids/inner.hpp"

namespace ids {

// Named inner coding schemes: CC-1, CC-2 (grouped [5,7]_oct with random
// offset), WM (sparsest-word block code with offset), TVC-1 (four designed
// codebooks, random non-repeating pattern, no offset), TVC-2 (same codebooks,
// round robin, with offset), identity.
struct Scheme {
    std::string id;
    InnerCode::Kind kind = InnerCode::Kind::block;
    int conv_group = 0;
    bool offset = false;
    ScheduleKind schedule = ScheduleKind::round_robin;
    int q = 4;
    std::vector<Codebook> books;

    int n() const;
    int k() const;
    int q_outer() const { return 1 << k(); }
    int nu() const { return kind == InnerCode::Kind::convolutional ? 2 : 0; }

    InnerCode make_code(std::size_t n_outer, std::uint64_t frame_seed) const;
    std::optional<OffsetSequence> make_offset(std::size_t n_channel,
                                              std::uint64_t frame_seed) const;
};

Scheme scheme_by_id(const std::string& id);
std::vector<std::string> scheme_ids();

// The four designed TVC codebooks ([4,4,4]_4, pairwise Levenshtein >= 4,
// 56 distinct words across the union).
const std::vector<Codebook>& designed_tvc_codebooks();

// Per-frame encoder/decoder pieces, shared through the frame seed.
struct FrameCode {
    InnerCode code;
    std::optional<OffsetSequence> offset;

    const OffsetSequence* offset_ptr() const { return offset ? &*offset : nullptr; }
};

FrameCode make_frame_code(const Scheme& scheme, std::size_t n_outer, std::uint64_t frame_seed);

}  // namespace ids
