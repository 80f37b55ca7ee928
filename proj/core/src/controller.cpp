#include "ssm/controller.hpp"

#include <algorithm>
#include <string>

#include "ssm/random.hpp"

namespace ssm {

void SsmConfig::validate() const {
  codec.validate();
  stash.validate();
  if (oram_backend) oram.validate();
  const std::uint64_t physical = geom.resolved_physical_blocks(codec);
  if (physical < frames_per_access()) {
    throw ConfigError("ssm: fewer physical blocks than t + d");
  }
  const std::uint64_t peak = stash.low_entries() +
                             std::uint64_t{frames_per_access()} * geom.shares_per_block +
                             codec.shares;
  if (peak > stash.capacity_entries()) {
    throw ConfigError("ssm: stash cannot absorb low watermark + one round of fetched shares");
  }
}

ShufflePlan plan_shuffle(Stash& stash, std::span<const std::uint64_t> frames,
                         std::uint32_t slots_per_frame, std::size_t place_count, Rng& rng) {
  std::vector<ShareLocation> slots;
  slots.reserve(frames.size() * slots_per_frame);
  for (const std::uint64_t f : frames) {
    for (std::uint32_t s = 0; s < slots_per_frame; ++s) slots.push_back({f, s});
  }
  place_count = std::min({place_count, slots.size(), stash.size()});
  shuffle(std::span(slots), rng);

  std::vector<StashEntry> picked = stash.take_random(rng, place_count);
  ShufflePlan plan;
  plan.moves.reserve(picked.size());
  plan.shares.reserve(picked.size());
  std::vector<StashEntry> leftovers;

  for (const auto& entry : picked) {
    bool placed = false;
    for (std::size_t i = 0; i < slots.size() && !placed; ++i) {
      const std::uint64_t frame = slots[i].block;
      const bool clash = std::ranges::any_of(plan.moves, [&](const ShareMove& m) {
        return m.to.block == frame && m.origin.logical == entry.origin.logical;
      });
      if (clash) continue;
      plan.moves.push_back({entry.origin, slots[i]});
      plan.shares.push_back(entry.share);
      slots[i] = slots.back();
      slots.pop_back();
      placed = true;
    }
    if (!placed) leftovers.push_back(entry);
  }
  stash.insert(leftovers);
  return plan;
}

SsmController::SsmController(const SsmConfig& cfg, std::uint64_t seed)
    : cfg_((cfg.validate(), cfg)),
      rng_(seed),
      key_{rng_(), rng_()},
      map_(SsmMap::init_layout(cfg_.geom, cfg_.codec, rng_)),
      memory_(map_.physical_blocks()),
      stash_(cfg_.stash),
      counters_(map_.logical_blocks(), 0) {
  for (std::uint64_t b = 0; b < memory_.blocks(); ++b) {
    auto raw = memory_.raw(b);
    for (std::size_t i = 0; i < kBlockBytes; i += 8) {
      std::uint64_t pad = rng_();
      for (std::size_t j = 0; j < 8; ++j, pad >>= 8) raw[i + j] = static_cast<std::uint8_t>(pad);
    }
  }
  const DataBlock zero{};
  for (std::uint64_t addr = 0; addr < map_.logical_blocks(); ++addr) {
    const auto shares = segment_block(zero, cfg_.codec, seed_context(addr), rng_);
    const auto locs = map_.lookup(addr);
    for (std::uint32_t j = 0; j < cfg_.codec.shares; ++j) {
      auto raw = memory_.raw(locs[j].block);
      shares[j].serialize(raw.subspan(locs[j].slot * kShareBytes).first<kShareBytes>());
    }
  }
  if (cfg_.oram_backend) {
    oram_ = std::make_unique<oram::PathOram>(cfg_.oram, map_.physical_blocks(), rng_, false);
  }
}

std::uint64_t SsmController::write_counter(std::uint64_t addr) const {
  if (addr >= counters_.size()) throw DomainError("ssm: unknown logical block");
  return counters_[addr];
}

SeedContext SsmController::seed_context(std::uint64_t addr) const {
  return SeedContext{key_, addr, write_counter(addr)};
}

std::vector<Share> SsmController::current_shares(std::uint64_t addr) const {
  const auto locs = map_.lookup(addr);
  std::vector<Share> out;
  out.reserve(locs.size());
  for (std::uint32_t j = 0; j < locs.size(); ++j) {
    if (locs[j].in_stash()) {
      out.push_back(*stash_.peek({addr, j}));
    } else {
      const auto raw = memory_.raw(locs[j].block);
      out.push_back(Share::deserialize(raw.subspan(locs[j].slot * kShareBytes).first<kShareBytes>()));
    }
  }
  return out;
}

AccessResult SsmController::read(std::uint64_t addr) {
  return round(Op::Read, addr, nullptr, false, true);
}

AccessResult SsmController::write(std::uint64_t addr, const DataBlock& data) {
  return round(Op::Write, addr, &data, true, false);
}

AccessResult SsmController::access_plus(Op op, std::uint64_t addr, const DataBlock* data) {
  if (!cfg_.op_type_protection) throw ConfigError("ssm: op-type protection is disabled");
  if (op == Op::Write && data == nullptr) throw DomainError("ssm: write without data");
  return round(op, addr, data, true, true);
}

AccessResult SsmController::access(Op op, std::uint64_t addr, const DataBlock* data) {
  if (cfg_.op_type_protection) return access_plus(op, addr, data);
  if (op == Op::Read) return read(addr);
  if (data == nullptr) throw DomainError("ssm: write without data");
  return write(addr, *data);
}

SsmController::Projection SsmController::project(std::span<const std::uint64_t> frames,
                                                 std::uint64_t addr, bool regenerate) const {
  std::uint64_t live = 0;
  for (const std::uint64_t f : frames) live += map_.occupied_in_block(f);
  std::uint64_t pool = stash_.size() + live;
  if (regenerate) {
    // New shares overwrite old ones already in (or about to enter) the stash.
    std::uint64_t resident = 0;
    for (const auto& loc : map_.lookup(addr)) {
      resident += loc.in_stash() || std::ranges::find(frames, loc.block) != frames.end();
    }
    pool += cfg_.codec.shares - resident;
  }
  const std::uint64_t low = cfg_.stash.low_entries();
  const std::uint64_t slots = std::uint64_t{frames.size()} * map_.slots_per_block();
  Projection p;
  p.place_count = static_cast<std::size_t>(pool > low ? std::min(slots, pool - low) : 0);
  p.end_entries = pool - p.place_count;
  return p;
}

void SsmController::draw_dummies(std::vector<std::uint64_t>& frames, std::size_t real_count) {
  frames.resize(real_count);
  const std::uint64_t physical = map_.physical_blocks();
  while (frames.size() < cfg_.frames_per_access()) {
    const std::uint64_t b = uniform_below(rng_, physical);
    if (std::ranges::find(frames, b) == frames.end()) frames.push_back(b);
  }
}

void SsmController::fetch_frame(std::uint64_t frame, AccessResult& result,
                                std::vector<StashEntry>& entries, std::vector<ShareMove>& moves) {
  const DataBlock bytes = memory_.read_block(frame, result.transactions);
  if (oram_) {
    oram_->access_counted(Op::Read, frame);
    result.bus_reads += cfg_.oram.path_slots();
    result.bus_writes += cfg_.oram.path_slots();
  } else {
    ++result.bus_reads;
  }
  for (std::uint32_t s = 0; s < map_.slots_per_block(); ++s) {
    const auto owner = map_.owner({frame, s});
    if (!owner) continue;
    const auto slice = std::span<const std::uint8_t, kBlockBytes>(bytes)
                           .subspan(s * kShareBytes)
                           .first<kShareBytes>();
    entries.push_back({*owner, Share::deserialize(slice)});
    moves.push_back({*owner, ShareLocation::stash()});
  }
}

void SsmController::write_frame(std::uint64_t frame, std::span<const ShareMove> moves,
                                std::span<const Share> shares, AccessResult& result) {
  DataBlock bytes;
  for (std::size_t i = 0; i < kBlockBytes; i += 8) {
    std::uint64_t pad = rng_();
    for (std::size_t j = 0; j < 8; ++j, pad >>= 8) bytes[i + j] = static_cast<std::uint8_t>(pad);
  }
  for (std::size_t i = 0; i < moves.size(); ++i) {
    if (moves[i].to.block != frame) continue;
    shares[i].serialize(std::span<std::uint8_t, kBlockBytes>(bytes)
                            .subspan(moves[i].to.slot * kShareBytes)
                            .first<kShareBytes>());
  }
  memory_.write_block(frame, bytes, result.transactions);
  // SSM+ folds the write-back into the frame's ORAM access.
  if (!oram_) ++result.bus_writes;
}

AccessResult SsmController::round(Op op, std::uint64_t addr, const DataBlock* data,
                                  bool regenerate, bool read_style_selection) {
  const std::uint32_t k = cfg_.codec.shares;
  const std::uint32_t t = cfg_.codec.threshold;
  const std::uint32_t frames_total = cfg_.frames_per_access();

  const auto locs_view = map_.lookup(addr);
  const std::vector<ShareLocation> locs(locs_view.begin(), locs_view.end());
  std::vector<std::uint32_t> hit_ordinals;
  std::vector<std::uint32_t> memory_ordinals;
  for (std::uint32_t j = 0; j < k; ++j) {
    (locs[j].in_stash() ? hit_ordinals : memory_ordinals).push_back(j);
  }

  // Combination selection: which of the block's in-memory shares to fetch.
  std::size_t real_count = 0;
  if (read_style_selection) {
    real_count = hit_ordinals.size() >= t ? 0 : t - hit_ordinals.size();
  } else {
    // A plain write fetches as many stale frames as the round allows so
    // their slots are reclaimed.
    real_count = std::min<std::size_t>(memory_ordinals.size(), frames_total);
  }
  partial_shuffle(std::span(memory_ordinals), real_count, rng_);
  memory_ordinals.resize(real_count);

  std::vector<std::uint64_t> frames;
  for (const std::uint32_t j : memory_ordinals) frames.push_back(locs[j].block);

  // Dummy selection with a stash-pressure guard.
  draw_dummies(frames, real_count);
  Projection best = project(frames, addr, regenerate);
  if (needs_shuffle(cfg_.stash, best.end_entries * kShareBytes)) {
    ++stats_.shuffle_pressure;
    std::vector<std::uint64_t> best_frames = frames;
    for (std::uint32_t attempt = 0;
         attempt < cfg_.max_dummy_redraws && real_count < frames_total &&
         needs_shuffle(cfg_.stash, best.end_entries * kShareBytes);
         ++attempt) {
      ++stats_.dummy_redraws;
      draw_dummies(frames, real_count);
      const Projection p = project(frames, addr, regenerate);
      if (p.end_entries < best.end_entries) {
        best = p;
        best_frames = frames;
      }
    }
    frames = std::move(best_frames);
  }
  const std::uint64_t next_peak = best.end_entries + std::uint64_t{frames_total} *
                                                         map_.slots_per_block() + k;
  if (next_peak > cfg_.stash.capacity_entries()) {
    throw CapacityError("ssm: stash pressure cannot be relieved for block " +
                        std::to_string(addr));
  }
  shuffle(std::span(frames), rng_);

  AccessResult result;
  result.transactions.reserve(2 * frames_total);
  result.real_ordinals = memory_ordinals;
  result.real_from_memory = static_cast<std::uint32_t>(memory_ordinals.size());
  {
    std::vector<StashEntry> entries;
    std::vector<ShareMove> moves;
    for (const std::uint64_t f : frames) fetch_frame(f, result, entries, moves);
    stash_.insert(entries);
    map_.remap(moves);
  }

  const bool need_data = read_style_selection;
  if (need_data) {
    std::vector<std::uint32_t> target = memory_ordinals;
    if (hit_ordinals.size() > t - target.size()) {
      partial_shuffle(std::span(hit_ordinals), t - target.size(), rng_);
      hit_ordinals.resize(t - target.size());
    }
    result.stash_hits = static_cast<std::uint32_t>(hit_ordinals.size());
    target.insert(target.end(), hit_ordinals.begin(), hit_ordinals.end());
    result.selected_ordinals = target;

    std::vector<Share> shares;
    shares.reserve(t);
    for (const std::uint32_t j : target) shares.push_back(*stash_.lookup({addr, j}));
    try {
      const Reconstruction rec = reconstruct(shares, cfg_.codec, seed_context(addr));
      result.data = rec.data;
      result.intact = rec.intact;
    } catch (const DomainError&) {
      // Tampered x-values can collide; that is an integrity failure too.
      result.intact = false;
    }
    ++result.reconstructions;
  }

  if (regenerate) {
    ++counters_[addr];
    const DataBlock& plain = (op == Op::Write) ? *data : result.data;
    if (op == Op::Write) result.data = *data;
    const auto fresh = segment_block(plain, cfg_.codec, seed_context(addr), rng_);
    std::vector<ShareMove> moves;
    std::vector<StashEntry> entries;
    for (std::uint32_t j = 0; j < k; ++j) {
      entries.push_back({{addr, j}, fresh[j]});
      moves.push_back({{addr, j}, ShareLocation::stash()});
    }
    map_.remap(moves);  // stale slots become FREE
    stash_.insert(entries);
    ++result.segmentations;
  }

  // Shuffle-and-write-back: drain the stash toward its low watermark.
  const std::uint64_t low = cfg_.stash.low_entries();
  const std::size_t place_count = stash_.size() > low ? stash_.size() - low : 0;
  ShufflePlan plan = plan_shuffle(stash_, frames, map_.slots_per_block(), place_count, rng_);
  map_.remap(plan.moves);
  result.shares_placed = static_cast<std::uint32_t>(plan.moves.size());
  for (const std::uint64_t f : frames) write_frame(f, plan.moves, plan.shares, result);

  if (!result.intact) {
    result.tamper_addr = addr;
    ++stats_.tamper_alarms;
  }
  (op == Op::Read ? stats_.reads : stats_.writes) += 1;
  stats_.stash_hits += result.stash_hits;
  stats_.shuffles += result.shares_placed > 0;
  stats_.bus_reads += result.bus_reads;
  stats_.bus_writes += result.bus_writes;
  stats_.segmentations += result.segmentations;
  stats_.reconstructions += result.reconstructions;
  return result;
}

}  // namespace ssm
