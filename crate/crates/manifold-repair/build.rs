use std::process::Command;

fn main() {
    // Embed `git describe` when available so reports name the exact source
    // state; fall back to the crate version for builds outside a checkout.
    let version = Command::new("git")
        .args(["describe", "--always", "--tags", "--dirty"])
        .output()
        .ok()
        .filter(|out| out.status.success())
        .and_then(|out| String::from_utf8(out.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| env!("CARGO_PKG_VERSION").to_string());
    println!("cargo:rustc-env=MANIFOLD_REPAIR_GIT_VERSION={version}");
    println!("cargo:rerun-if-changed=build.rs");
}
