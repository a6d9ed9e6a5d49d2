#include "gradepipe/error.hpp"

namespace gradepipe {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::FileNotFound: return "FileNotFound";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::TruncatedData: return "TruncatedData";
    case Errc::IoFailure: return "IoFailure";
    case Errc::WrongChannelCount: return "WrongChannelCount";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::BlackPixel: return "BlackPixel";
    case Errc::AchromaticPixel: return "AchromaticPixel";
    case Errc::NotRgb: return "NotRgb";
    case Errc::ConstantImage: return "ConstantImage";
    case Errc::EmptyMask: return "EmptyMask";
    case Errc::ForegroundTouchesBorder: return "ForegroundTouchesBorder";
    case Errc::DegenerateShape: return "DegenerateShape";
    case Errc::NonPositiveAxis: return "NonPositiveAxis";
    case Errc::NonPositiveArea: return "NonPositiveArea";
    case Errc::WrongNeighborCount: return "WrongNeighborCount";
    case Errc::PatternOutOfRange: return "PatternOutOfRange";
    case Errc::ImageTooSmall: return "ImageTooSmall";
    case Errc::EmptyGrid: return "EmptyGrid";
    case Errc::BadAngleCount: return "BadAngleCount";
    case Errc::BadScaleCount: return "BadScaleCount";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::ZeroVarianceFeature: return "ZeroVarianceFeature";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::NormalizationMismatch: return "NormalizationMismatch";
    case Errc::MissingClass: return "MissingClass";
    case Errc::SingularCovariance: return "SingularCovariance";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::UnfittedModel: return "UnfittedModel";
    case Errc::MalformedModel: return "MalformedModel";
    case Errc::UnknownGrade: return "UnknownGrade";
    case Errc::DuplicatePath: return "DuplicatePath";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::GradeTooSmall: return "GradeTooSmall";
  }
  return "Unknown";
}

}  // namespace gradepipe
