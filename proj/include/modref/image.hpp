#pragma once

#include <cstdint>
#include <cstdlib>
#include <vector>

#include "modref/error.hpp"

namespace modref {

/// Depth value stored at sky pixels (meters). Kept finite so float maps stay
/// losslessly serializable.
inline constexpr float kDepthSky = 1.0e9f;

/// Flow components with |value| above this are the conventional "unknown"
/// sentinel and must pass through readers/writers unchanged.
inline constexpr float kFlowUnknownThreshold = 1.0e9f;

/// Label used to exclude pixels from segmentation scoring.
inline constexpr int kLabelIgnore = 255;

/// H×W×2 per-pixel forward displacement in pixels (u right, v down), frame
/// t -> t+1. Interleaved (u,v), row-major.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  FlowField() = default;
  FlowField(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 2, 0.0f) {}

  size_t pixels() const { return static_cast<size_t>(width) * height; }
  float& u(int x, int y) { return data[2 * (static_cast<size_t>(y) * width + x)]; }
  float& v(int x, int y) { return data[2 * (static_cast<size_t>(y) * width + x) + 1]; }
  float u(int x, int y) const { return data[2 * (static_cast<size_t>(y) * width + x)]; }
  float v(int x, int y) const { return data[2 * (static_cast<size_t>(y) * width + x) + 1]; }

  bool operator==(const FlowField&) const = default;
};

/// H×W positive metric depth along the camera +z axis. Sky carries kDepthSky.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  DepthMap() = default;
  DepthMap(int w, int h, float fill = 0.0f)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  float& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  float at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }

  bool operator==(const DepthMap&) const = default;
};

/// H×W×3 camera-space unit normals; (0,0,0) marks invalid (sky) pixels.
/// Interleaved xyz, row-major.
struct NormalMap {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  NormalMap() = default;
  NormalMap(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0.0f) {}

  float* at(int x, int y) { return &data[3 * (static_cast<size_t>(y) * width + x)]; }
  const float* at(int x, int y) const { return &data[3 * (static_cast<size_t>(y) * width + x)]; }

  bool operator==(const NormalMap&) const = default;
};

/// H×W integer class labels. Stored wide so out-of-range values can be
/// detected at serialization boundaries instead of silently wrapping.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<int32_t> data;

  LabelMap() = default;
  LabelMap(int w, int h, int32_t fill = 0)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  int32_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  int32_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }

  bool operator==(const LabelMap&) const = default;
};

/// H×W×C per-class scores, planar [class][row][col]. Valid maps hold a
/// probability simplex per pixel.
struct ScoreMap {
  int width = 0;
  int height = 0;
  int classes = 0;
  std::vector<float> data;

  ScoreMap() = default;
  ScoreMap(int w, int h, int c)
      : width(w), height(h), classes(c), data(static_cast<size_t>(w) * h * c, 0.0f) {}

  float& at(int c, int x, int y) {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
  float at(int c, int x, int y) const {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }

  /// Argmax over classes; ties resolve to the lowest class id.
  int32_t argmax(int x, int y) const {
    int best = 0;
    float best_v = at(0, x, y);
    for (int c = 1; c < classes; ++c) {
      float v = at(c, x, y);
      if (v > best_v) {
        best_v = v;
        best = c;
      }
    }
    return best;
  }

  bool operator==(const ScoreMap&) const = default;
};

/// 8-bit RGB, interleaved, row-major.
struct Rgb8Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  Rgb8Image() = default;
  Rgb8Image(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0) {}

  uint8_t* at(int x, int y) { return &data[3 * (static_cast<size_t>(y) * width + x)]; }
  const uint8_t* at(int x, int y) const { return &data[3 * (static_cast<size_t>(y) * width + x)]; }

  bool operator==(const Rgb8Image&) const = default;
};

/// 8-bit single channel; used for stored label images and binary masks
/// (masks hold 0 or 255).
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  GrayImage() = default;
  GrayImage(int w, int h, uint8_t fill = 0)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }

  bool operator==(const GrayImage&) const = default;
};

inline LabelMap to_label_map(const GrayImage& g) {
  LabelMap m(g.width, g.height);
  for (size_t i = 0; i < g.data.size(); ++i) m.data[i] = g.data[i];
  return m;
}

inline GrayImage to_gray(const LabelMap& m) {
  GrayImage g(m.width, m.height);
  for (size_t i = 0; i < m.data.size(); ++i) {
    int32_t v = m.data[i];
    if (v < 0 || v > 255) throw RangeError("label value " + std::to_string(v) + " exceeds 8-bit range");
    g.data[i] = static_cast<uint8_t>(v);
  }
  return g;
}

/// One-hot encode labels into a score map. Labels must be < classes.
inline ScoreMap one_hot(const LabelMap& labels, int classes) {
  ScoreMap s(labels.width, labels.height, classes);
  for (int y = 0; y < labels.height; ++y) {
    for (int x = 0; x < labels.width; ++x) {
      int32_t l = labels.at(x, y);
      if (l < 0 || l >= classes)
        throw RangeError("label " + std::to_string(l) + " not below class count " +
                         std::to_string(classes));
      s.at(l, x, y) = 1.0f;
    }
  }
  return s;
}

}  // namespace modref
