#include "stagecraft/interpretation.hpp"

#include <cmath>
#include <numeric>

namespace stagecraft {

namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool sign_flip(double prev, double valence) {
  return sign(prev) != 0 && sign(valence) != 0 && sign(prev) != sign(valence);
}

Construal literal_of(const ActionEntry& entry) {
  return {ConstrualKind::literal, entry.action_id, entry.action_id, entry.action_id, std::nullopt};
}

}  // namespace

std::string_view to_string(ConstrualKind k) {
  switch (k) {
    case ConstrualKind::literal: return "literal";
    case ConstrualKind::metaphoric: return "metaphoric";
    case ConstrualKind::ironic: return "ironic";
  }
  return "?";
}

std::optional<ConstrualKind> construal_kind_from_string(std::string_view s) {
  if (s == "literal") return ConstrualKind::literal;
  if (s == "metaphoric") return ConstrualKind::metaphoric;
  if (s == "ironic") return ConstrualKind::ironic;
  return std::nullopt;
}

bool link_armed(const MetaphorLink& link, double prev_context, double valence) {
  if (std::abs(prev_context) < link.threshold) return false;
  if (link.mode == LinkMode::shock) return sign_flip(prev_context, valence);
  return sign(prev_context) != 0 && sign(prev_context) == sign(valence);
}

std::vector<MetaphorLink> armed_links(const ActionEntry& entry, double prev_context,
                                      double valence) {
  std::vector<MetaphorLink> out;
  for (const auto& link : entry.metaphor_links) {
    if (link_armed(link, prev_context, valence)) out.push_back(link);
  }
  return out;
}

Construal ironic_enactment(const ActionEntry& entry, Role /*role*/,
                           std::string_view expectation_action_id, const ActionKB& kb) {
  if (expectation_action_id.empty())
    throw InterpretationError("action '" + entry.action_id + "' declares no irony expectation");
  if (!kb.contains(expectation_action_id))
    throw InterpretationError("irony expectation '" + std::string(expectation_action_id) +
                              "' of action '" + entry.action_id + "' is not in the KB");
  return {ConstrualKind::ironic, entry.action_id, std::string(expectation_action_id),
          entry.action_id, std::nullopt};
}

Construal construe(const ActionEntry& entry, Role role, double prev_context, double valence,
                   const ActionKB& kb, const EngineConfig& cfg) {
  if (cfg.irony_enabled && entry.irony_expectation &&
      std::abs(valence - prev_context) >= cfg.irony_threshold &&
      sign_flip(prev_context, valence)) {
    try {
      return ironic_enactment(entry, role, *entry.irony_expectation, kb);
    } catch (const InterpretationError&) {
      // dangling expectation: read the action without irony
    }
  }
  for (const auto& link : entry.metaphor_links) {
    if (link_armed(link, prev_context, valence) && kb.contains(link.target_action_id)) {
      return {ConstrualKind::metaphoric, entry.action_id, link.target_action_id, entry.action_id,
              link};
    }
  }
  return literal_of(entry);
}

std::size_t weighted_index(std::span<const int> weights, SeededStream& rng) {
  const long total = std::accumulate(weights.begin(), weights.end(), 0L);
  if (weights.empty() || total <= 0) throw InterpretationError("no weighted candidates");
  auto r = static_cast<long>(rng.below(static_cast<std::uint64_t>(total)));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (r < weights[i]) return i;
    r -= weights[i];
  }
  return weights.size() - 1;
}

std::vector<ResolvedEnactment> platform_enactments(const ActionKB& kb, const GestureDB& db,
                                                   std::string_view action_id, Role role,
                                                   const std::set<Hardware>& platform) {
  std::vector<ResolvedEnactment> out;
  for (const auto& e : enactments_for(kb, db, action_id, role)) {
    if (e.first->fits(platform)) out.push_back(e);
  }
  return out;
}

const GestureSpec& select_enactment(const Construal& construal, Role role, const ActionKB& kb,
                                    const GestureDB& db, int arousal, SeededStream& rng,
                                    const std::set<Hardware>& platform) {
  std::vector<ResolvedEnactment> candidates;
  try {
    candidates = platform_enactments(kb, db, construal.enacted_action_id, role, platform);
  } catch (const KbError& e) {
    throw InterpretationError(e.what());
  }
  if (candidates.empty()) {
    throw InterpretationError("no enactment of '" + construal.enacted_action_id + "' for the " +
                              std::string(to_string(role)) + " role fits the platform");
  }
  if (arousal >= 2) {
    std::vector<ResolvedEnactment> sweeping;
    for (const auto& c : candidates) {
      if (c.first->has(GestureFlag::sweeping)) sweeping.push_back(c);
    }
    if (!sweeping.empty()) candidates = std::move(sweeping);
  }
  std::vector<int> weights;
  weights.reserve(candidates.size());
  for (const auto& c : candidates) weights.push_back(c.second.weight());
  return *candidates[weighted_index(weights, rng)].first;
}

}  // namespace stagecraft
