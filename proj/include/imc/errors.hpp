#pragma once
#include <stdexcept>
#include <string>

namespace imc {

// every failure mode the library reports; tests match on the code, not the text
enum class errc {
  NegativeEntry,
  RowSumViolation,
  IndexOrder,
  Reducible,
  ZeroReference,
  EpsTooLarge,
  UnsupportedPair,
  ZeroImageMass,
  NotReversible,
  ZeroFunction,
  RangeViolation,
  MissingSigma,
  NeverReached,
  ThresholdNotMet,
  HorizonTooShort,
  DepthTooLarge,
  TooLarge,
  NotMember,
  NotSymmetricBD,
  PerturbationTooLarge,
  DeltaTooLarge,
  InfeasiblePerturbation,
  NoAdmissibleWitness,
  SizeMismatch,
  BadInput,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::NegativeEntry: return "NegativeEntry";
    case errc::RowSumViolation: return "RowSumViolation";
    case errc::IndexOrder: return "IndexOrder";
    case errc::Reducible: return "Reducible";
    case errc::ZeroReference: return "ZeroReference";
    case errc::EpsTooLarge: return "EpsTooLarge";
    case errc::UnsupportedPair: return "UnsupportedPair";
    case errc::ZeroImageMass: return "ZeroImageMass";
    case errc::NotReversible: return "NotReversible";
    case errc::ZeroFunction: return "ZeroFunction";
    case errc::RangeViolation: return "RangeViolation";
    case errc::MissingSigma: return "MissingSigma";
    case errc::NeverReached: return "NeverReached";
    case errc::ThresholdNotMet: return "ThresholdNotMet";
    case errc::HorizonTooShort: return "HorizonTooShort";
    case errc::DepthTooLarge: return "DepthTooLarge";
    case errc::TooLarge: return "TooLarge";
    case errc::NotMember: return "NotMember";
    case errc::NotSymmetricBD: return "NotSymmetricBD";
    case errc::PerturbationTooLarge: return "PerturbationTooLarge";
    case errc::DeltaTooLarge: return "DeltaTooLarge";
    case errc::InfeasiblePerturbation: return "InfeasiblePerturbation";
    case errc::NoAdmissibleWitness: return "NoAdmissibleWitness";
    case errc::SizeMismatch: return "SizeMismatch";
    case errc::BadInput: return "BadInput";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(errc c, const std::string& what)
      : std::runtime_error(std::string(errc_name(c)) + ": " + what), code_(c) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& what) { throw Error(c, what); }

inline void require(bool ok, errc c, const std::string& what) {
  if (!ok) fail(c, what);
}

}  // namespace imc
