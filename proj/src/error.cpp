#include "fatou/error.hpp"

namespace fatou {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NotParabolic: return "NotParabolic";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::OutOfBox: return "OutOfBox";
    case ErrorCode::UnknownComponent: return "UnknownComponent";
    case ErrorCode::RayCrisis: return "RayCrisis";
    case ErrorCode::SuperattractingUnsupported: return "SuperattractingUnsupported";
    case ErrorCode::DivergedFromBasin: return "DivergedFromBasin";
    case ErrorCode::NotLanded: return "NotLanded";
    case ErrorCode::NotAttracting: return "NotAttracting";
    case ErrorCode::NotInYk: return "NotInY_k";
    case ErrorCode::NoBoundaryCycle: return "NoBoundaryCycle";
    case ErrorCode::NoLandingRays: return "NoLandingRays";
    case ErrorCode::DepthBudget: return "DepthBudget";
    case ErrorCode::OnGraph: return "OnGraph";
    case ErrorCode::InsufficientDepth: return "InsufficientDepth";
    case ErrorCode::NotInterior: return "NotInterior";
    case ErrorCode::SingularParameter: return "SingularParameter";
  }
  return "Unknown";
}

}  // namespace fatou
