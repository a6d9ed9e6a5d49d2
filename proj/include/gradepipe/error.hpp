#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gradepipe {

enum class Errc {
  // raster
  FileNotFound,
  MalformedHeader,
  TruncatedData,
  IoFailure,
  WrongChannelCount,
  DimensionMismatch,
  InvalidParameter,
  // preprocess
  BlackPixel,
  AchromaticPixel,
  NotRgb,
  ConstantImage,
  EmptyMask,
  ForegroundTouchesBorder,
  // shape
  DegenerateShape,
  NonPositiveAxis,
  NonPositiveArea,
  // texture
  WrongNeighborCount,
  PatternOutOfRange,
  ImageTooSmall,
  EmptyGrid,
  BadAngleCount,
  BadScaleCount,
  // classify
  NonFiniteInput,
  ZeroVarianceFeature,
  LengthMismatch,
  NormalizationMismatch,
  MissingClass,
  SingularCovariance,
  KTooLarge,
  UnfittedModel,
  MalformedModel,
  // harness
  UnknownGrade,
  DuplicatePath,
  MalformedLine,
  GradeTooSmall,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure in the library is reported through this type; `code()`
/// identifies the failure class and `what()` carries the detail.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code), detail_(detail) {}

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace gradepipe
