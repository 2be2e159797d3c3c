#pragma once

#include <stdexcept>
#include <string>

namespace pwt {

enum class Err {
  RankDeficient,
  OutsideDomain,
  MapsOutside,
  NoBoundedDynamics,
  TooShort,
  NotStabilized,
  BadRegionSpec,
  ArcExplosion,
  SynthesisFailed,
  ConfigError,
  IoError,
  Overflow,
  InvalidArgument,
};

inline const char* err_code_name(Err e) {
  switch (e) {
    case Err::RankDeficient: return "RankDeficient";
    case Err::OutsideDomain: return "OutsideDomain";
    case Err::MapsOutside: return "MapsOutside";
    case Err::NoBoundedDynamics: return "NoBoundedDynamics";
    case Err::TooShort: return "TooShort";
    case Err::NotStabilized: return "NotStabilized";
    case Err::BadRegionSpec: return "BadRegionSpec";
    case Err::ArcExplosion: return "ArcExplosion";
    case Err::SynthesisFailed: return "SynthesisFailed";
    case Err::ConfigError: return "ConfigError";
    case Err::IoError: return "IoError";
    case Err::Overflow: return "Overflow";
    case Err::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(err_code_name(code)) + ": " + what), code_(code) {}

  Err code() const { return code_; }

 private:
  Err code_;
};

}  // namespace pwt
