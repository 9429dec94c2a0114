#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace speedbench {

/// Virtual target-speed re-annotation settings.
///
/// T_min is not pinned down by the reference procedure; 0.5 s is this
/// project's choice for both presets.
struct AnnotationParams {
  int horizon = 40;          ///< future frames F scanned for the tendency
  int fps = 10;
  double t_min = 0.5;        ///< s
  double t_max = 3.0;        ///< s
  double max_extend = 10.0;  ///< m/s clip on the extrapolated change
  std::uint64_t seed = 0;

  friend bool operator==(const AnnotationParams&, const AnnotationParams&) = default;
};

enum class AnnotationPreset { Long, Short };

/// Long: T_max 3.0 s, clip 10.0 m/s. Short: T_max 1.5 s, clip 3.0 m/s. Both
/// scan 40 frames at 10 FPS.
AnnotationParams preset(AnnotationPreset which);
AnnotationPreset parse_preset(std::string_view name);

/// Throws ValidationError unless horizon >= 1, fps >= 1,
/// 0 <= t_min <= t_max, and max_extend > 0.
void validate(const AnnotationParams& params);

/// Extremal future speed preserving the current trend: the max over the
/// next `horizon` frames when speed is about to rise, the min when it is
/// about to fall, the current speed otherwise. The window is truncated at
/// the end of the trace.
double tendency_speed(std::span<const double> trace, std::size_t t, int horizon);

struct AnnotatedFrame {
  double v = 0.0;
  double v_tend = 0.0;
  double v_virt = 0.0;
};

using AnnotatedTrace = std::vector<AnnotatedFrame>;

/// The per-frame extrapolation factor r_t in [t_min, t_max]. Draws come
/// from a counter-based stream keyed by (seed, stream, t), so any frame's
/// draw is reproducible in isolation.
double extrapolation_factor(const AnnotationParams& params, std::uint64_t stream, std::size_t t);

/// Uniform [0, 1) draw underlying extrapolation_factor.
double unit_draw(std::uint64_t seed, std::uint64_t stream, std::size_t t);

/// Tendency plus a clipped linear extrapolation of its frame-to-frame change:
///   dv_t   = clip((tend_t - tend_{t-1}) * fps * r_t, +-max_extend)
///   virt_t = max(tend_t + dv_t, 0),  virt_0 = tend_0
/// `stream` separates traces sharing a seed. Throws TraceTooShort for fewer
/// than two samples.
AnnotatedTrace virtual_target_speed(std::span<const double> trace, const AnnotationParams& params,
                                    std::uint64_t stream = 0);

/// CSV with header `frame,v,v_tend,v_virt`, six decimals.
std::string annotation_csv(const AnnotatedTrace& trace);

/// Speeds from a CSV whose header has a `v` column. Throws ParseError.
std::vector<double> parse_speed_csv(std::string_view text);

}  // namespace speedbench
