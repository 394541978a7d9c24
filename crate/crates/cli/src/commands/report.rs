use std::fmt::Write as _;
use std::path::Path;

use crate::cli::ReportArgs;
use crate::error::{CliError, CliResult, Classify};
use crate::Ctx;

/// Report sections by file stem prefix, in document order.
const SECTIONS: [&str; 6] = ["ingest", "summary", "compare", "distributions", "classification", "importance"];

fn sorted_files(dir: &Path, ext: &str) -> CliResult<Vec<String>> {
    let mut names = Vec::new();
    for entry in std::fs::read_dir(dir).internal_err(format!("listing {}", dir.display()))? {
        let entry = entry.internal_err("listing")?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.ends_with(ext) {
            names.push(name);
        }
    }
    names.sort();
    Ok(names)
}

fn section_of(name: &str) -> Option<usize> {
    let stem = name.strip_suffix(".md")?;
    SECTIONS.iter().position(|s| stem == *s || stem.strip_prefix(s).is_some_and(|rest| rest.starts_with('_')))
}

pub fn run(ctx: &mut Ctx, args: &ReportArgs) -> CliResult<()> {
    let reports = ctx.out.join("reports");
    let mut parts: Vec<(usize, String)> =
        sorted_files(&reports, ".md")?.into_iter().filter_map(|n| section_of(&n).map(|s| (s, n))).collect();
    parts.sort();
    if parts.is_empty() {
        return Err(CliError::input(format!("no reports found in {}; run the pipeline first", reports.display())));
    }
    let mut doc = String::new();
    let _ = writeln!(doc, "# {}\n", args.title);
    for (_, name) in &parts {
        let path = reports.join(name);
        ctx.record_input(&path)?;
        let text = std::fs::read_to_string(&path).internal_err(format!("reading {}", path.display()))?;
        doc.push_str(text.trim_end());
        doc.push_str("\n\n");
    }
    let figures = sorted_files(&ctx.out.join("figures"), ".svg")?;
    if !figures.is_empty() {
        let _ = writeln!(doc, "## Figures\n");
        for f in &figures {
            let _ = writeln!(doc, "![{}](../figures/{f})\n", f.trim_end_matches(".svg"));
        }
    }
    ctx.write("reports/report.md", doc.trim_end().to_string() + "\n")?;
    println!("report stitched from {} sections and {} figures", parts.len(), figures.len());
    Ok(())
}
