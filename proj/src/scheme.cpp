#include "ids/scheme.hpp"

#include <array>
#include <stdexcept>

namespace ids {

namespace {

// Four [4,4]_4 codebooks with pairwise indel-Levenshtein distance >= 4 and
// 56 distinct words in the union.
constexpr std::array<std::array<const char*, 16>, 4> kTvcWords = {{
    {"0000", "0022", "0323", "1010", "1111", "1133", "1232", "2021", "2120", "2222", "2233",
     "3031", "3130", "3200", "3322", "3333"},
    {"0001", "0033", "0212", "1020", "1122", "1131", "1303", "2002", "2203", "2211", "2313",
     "3010", "3222", "3230", "3311", "3332"},
    {"0030", "0111", "0232", "0313", "1001", "1202", "1323", "2200", "2213", "2222", "2303",
     "3002", "3212", "3311", "3320", "3333"},
    {"0003", "0102", "0133", "1011", "1100", "1232", "2121", "2200", "2223", "2303", "3001",
     "3112", "3130", "3202", "3231", "3333"},
}};

std::vector<Codebook> build_designed_tvc() {
    std::vector<Codebook> cbs;
    for (const auto& book : kTvcWords) {
        Codebook cb{4, 4, 4, {}};
        for (const char* w : book) {
            SymbolVec word;
            for (const char* c = w; *c; ++c) word.push_back(static_cast<Symbol>(*c - '0'));
            cb.words.push_back(std::move(word));
        }
        cbs.push_back(std::move(cb));
    }
    return cbs;
}

}  // namespace

const std::vector<Codebook>& designed_tvc_codebooks() {
    static const std::vector<Codebook> cbs = build_designed_tvc();
    return cbs;
}

int Scheme::n() const {
    if (kind == InnerCode::Kind::convolutional) return conv_group;
    return books.at(0).n;
}

int Scheme::k() const {
    if (kind == InnerCode::Kind::convolutional) return conv_group;
    return books.at(0).k;
}

InnerCode Scheme::make_code(std::size_t n_outer, std::uint64_t frame_seed) const {
    switch (kind) {
        case InnerCode::Kind::convolutional:
            return InnerCode::convolutional(conv_group);
        case InnerCode::Kind::block:
            return InnerCode::block(books.at(0));
        case InnerCode::Kind::tvc: {
            const int t = static_cast<int>(books.size());
            auto sched = tvc_schedule(schedule, t, n_outer, derive_seed(frame_seed, 0x5cedu));
            return InnerCode::tvc(books, std::move(sched));
        }
    }
    throw std::logic_error("scheme: unknown kind");
}

std::optional<OffsetSequence> Scheme::make_offset(std::size_t n_channel,
                                                  std::uint64_t frame_seed) const {
    if (!offset) return std::nullopt;
    return OffsetSequence::make(derive_seed(frame_seed, 0x0f5u), n_channel, q);
}

Scheme scheme_by_id(const std::string& id) {
    Scheme s;
    s.id = id;
    if (id == "CC-1" || id == "CC-2") {
        s.kind = InnerCode::Kind::convolutional;
        s.conv_group = id == "CC-1" ? 2 : 4;
        s.offset = true;
        return s;
    }
    if (id == "WM") {
        s.kind = InnerCode::Kind::block;
        s.books = {dm_construct(4, 4, 4)};
        s.offset = true;
        return s;
    }
    if (id == "TVC-1") {
        s.kind = InnerCode::Kind::tvc;
        s.books = designed_tvc_codebooks();
        s.schedule = ScheduleKind::random_no_repeat;
        s.offset = false;
        return s;
    }
    if (id == "TVC-2") {
        s.kind = InnerCode::Kind::tvc;
        s.books = designed_tvc_codebooks();
        s.schedule = ScheduleKind::round_robin;
        s.offset = true;
        return s;
    }
    if (id == "identity") {
        s.kind = InnerCode::Kind::block;
        Codebook cb{1, 2, 4, {}};
        for (int v = 0; v < 4; ++v) cb.words.push_back(SymbolVec{static_cast<Symbol>(v)});
        s.books = {cb};
        s.offset = false;
        return s;
    }
    throw std::invalid_argument("unknown inner scheme: " + id);
}

std::vector<std::string> scheme_ids() {
    return {"CC-1", "CC-2", "WM", "TVC-1", "TVC-2", "identity"};
}

FrameCode make_frame_code(const Scheme& scheme, std::size_t n_outer, std::uint64_t frame_seed) {
    FrameCode fc{scheme.make_code(n_outer, frame_seed), std::nullopt};
    const std::size_t n_channel = fc.code.sections_for(n_outer) * static_cast<std::size_t>(fc.code.n());
    fc.offset = scheme.make_offset(n_channel, frame_seed);
    return fc;
}

}  // namespace ids
