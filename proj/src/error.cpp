#include "morselab/error.hpp"

namespace morselab {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Disconnected: return "Disconnected";
    case Errc::IsolatedVertex: return "IsolatedVertex";
    case Errc::SigmaTouchesBoundary: return "SigmaTouchesBoundary";
    case Errc::LineOutsideDomain: return "LineOutsideDomain";
    case Errc::SignChangeWithoutSeparator: return "SignChangeWithoutSeparator";
    case Errc::FaceAlreadyLabeled: return "FaceAlreadyLabeled";
    case Errc::UnpairedFace: return "UnpairedFace";
    case Errc::PeriodicMapPresent: return "PeriodicMapPresent";
    case Errc::PeriodicMapMissing: return "PeriodicMapMissing";
    case Errc::InvalidPartition: return "InvalidPartition";
    case Errc::Indeterminate: return "Indeterminate";
    case Errc::ASingular: return "ASingular";
    case Errc::Singular: return "Singular";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::EmptyInterface: return "EmptyInterface";
    case Errc::NotSimple: return "NotSimple";
    case Errc::AllZero: return "AllZero";
    case Errc::Config: return "Config";
    case Errc::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace morselab
