#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace scram_xai {

// The nine monitored reactor signals, in console table order.
enum class SignalId : std::size_t {
  NeutronCounts = 0,  // 1/s, channel 1
  LinearPower,        // %, channel 3
  NeutronFlux,        // %, channel 4
  Ss1Position,        // cm
  Ss2Position,        // cm
  RrPosition,         // cm
  RrActiveState,
  Ss1ActiveState,
  Ss2ActiveState,
};

inline constexpr std::size_t kSignalCount = 9;
inline constexpr std::size_t kContinuousCount = 6;

inline constexpr std::array<SignalId, kSignalCount> kAllSignals = {
    SignalId::NeutronCounts,  SignalId::LinearPower,    SignalId::NeutronFlux,
    SignalId::Ss1Position,    SignalId::Ss2Position,    SignalId::RrPosition,
    SignalId::RrActiveState,  SignalId::Ss1ActiveState, SignalId::Ss2ActiveState,
};

inline constexpr std::array<std::string_view, kSignalCount> kSignalNames = {
    "neutron_counts", "linear_power",    "neutron_flux",
    "ss1_position",   "ss2_position",    "rr_position",
    "rr_active_state", "ss1_active_state", "ss2_active_state",
};

constexpr std::size_t index_of(SignalId id) { return static_cast<std::size_t>(id); }

constexpr std::string_view name_of(SignalId id) { return kSignalNames[index_of(id)]; }

constexpr bool is_categorical(SignalId id) { return index_of(id) >= kContinuousCount; }

constexpr bool is_position(SignalId id) {
  return id == SignalId::Ss1Position || id == SignalId::Ss2Position ||
         id == SignalId::RrPosition;
}

inline std::optional<SignalId> signal_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kSignalCount; ++i) {
    if (kSignalNames[i] == name) return kAllSignals[i];
  }
  return std::nullopt;
}

// Control rod motion indicator. Stored in series columns as the enum value.
enum class RodState : int { Insert = 0, Withdraw = 1, Steady = 2 };

inline constexpr std::array<std::string_view, 3> kRodStateTokens = {"insert", "withdraw",
                                                                    "steady"};

constexpr std::string_view token_of(RodState s) {
  return kRodStateTokens[static_cast<std::size_t>(s)];
}

inline std::optional<RodState> rod_state_from_token(std::string_view token) {
  for (std::size_t i = 0; i < kRodStateTokens.size(); ++i) {
    if (kRodStateTokens[i] == token) return static_cast<RodState>(i);
  }
  return std::nullopt;
}

// Fixed attack ordering: Replay#k falsifies the first k of these.
inline constexpr std::array<SignalId, 6> kReplayOrder = {
    SignalId::NeutronCounts, SignalId::LinearPower, SignalId::NeutronFlux,
    SignalId::RrPosition,    SignalId::Ss1Position, SignalId::Ss2Position,
};

}  // namespace scram_xai
