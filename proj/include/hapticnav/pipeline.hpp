#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hapticnav/perception.hpp"
#include "hapticnav/scene.hpp"

namespace hapticnav {

// Frames in, consolidated scene out. One instance per stream; not thread-safe.
class ScenePipeline {
public:
    ScenePipeline(CameraModel camera, PerceptionConfig perception, SceneConfig scene)
        : camera_(std::move(camera)), perception_(perception), scene_(scene), window_(scene.window_capacity) {
        camera_.validate();
        scene_.validate();
    }

    // Maps and buffers one frame. Per-detection problems land in diagnostics().
    const MappedFrame& push(const DetectionFrame& frame) {
        MappedFrame mapped = map_frame(frame, camera_, perception_);
        diagnostics_.insert(diagnostics_.end(), mapped.diagnostics.begin(), mapped.diagnostics.end());
        window_.push_frame(std::move(mapped));
        return window_.frames().back();
    }

    bool window_full() const { return window_.size() == window_.capacity(); }

    SceneSummary summary() const { return consolidate(window_, scene_.persistence_k, scene_.hazard_distance_m); }

    const SceneWindow& window() const { return window_; }
    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

    void reset() {
        window_ = SceneWindow(scene_.window_capacity);
        diagnostics_.clear();
    }

private:
    CameraModel camera_;
    PerceptionConfig perception_;
    SceneConfig scene_;
    SceneWindow window_;
    std::vector<std::string> diagnostics_;
};

}  // namespace hapticnav
