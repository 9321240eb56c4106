#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mobdisj {

enum class ErrorCode {
  InvalidModulus,
  ModulusMismatch,
  ZeroInverse,
  ZeroElement,
  RepeatedRoot,
  ReducibleExtension,
  NotInGroup,
  SingularMatrix,
  LinearMap,
  NonSquareDeterminant,
  DegenerateSpectral,
  SpectralPole,
  LinearPower,
  TableTooSmall,
  TrivialCharacter,
  BothFrequenciesZero,
  BadIndices,
  ZeroFrequency,
  CollisionFound,
  InvalidArgument,
  RangeGuard,
  Config,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidModulus: return "InvalidModulus";
    case ErrorCode::ModulusMismatch: return "ModulusMismatch";
    case ErrorCode::ZeroInverse: return "ZeroInverse";
    case ErrorCode::ZeroElement: return "ZeroElement";
    case ErrorCode::RepeatedRoot: return "RepeatedRoot";
    case ErrorCode::ReducibleExtension: return "ReducibleExtension";
    case ErrorCode::NotInGroup: return "NotInGroup";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::LinearMap: return "LinearMap";
    case ErrorCode::NonSquareDeterminant: return "NonSquareDeterminant";
    case ErrorCode::DegenerateSpectral: return "DegenerateSpectral";
    case ErrorCode::SpectralPole: return "SpectralPole";
    case ErrorCode::LinearPower: return "LinearPower";
    case ErrorCode::TableTooSmall: return "TableTooSmall";
    case ErrorCode::TrivialCharacter: return "TrivialCharacter";
    case ErrorCode::BothFrequenciesZero: return "BothFrequenciesZero";
    case ErrorCode::BadIndices: return "BadIndices";
    case ErrorCode::ZeroFrequency: return "ZeroFrequency";
    case ErrorCode::CollisionFound: return "CollisionFound";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RangeGuard: return "RangeGuard";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace mobdisj
