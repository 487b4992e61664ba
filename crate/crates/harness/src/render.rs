use lpp_core::grid::{GridState, Trajectory};

pub fn render_state(s: &GridState) -> String {
    s.render()
}

/// All visited states, blank line between frames.
pub fn render_trajectory(t: &Trajectory) -> String {
    let frames: Vec<String> = t
        .steps
        .iter()
        .map(|s| s.state.render())
        .chain(std::iter::once(t.final_state.render()))
        .collect();
    frames.join("\n")
}
