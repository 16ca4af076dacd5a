import setuptools
import subprocess
import os

qssim_version = (
    subprocess.run(["git", "describe", "--tags"], stdout=subprocess.PIPE)
    .stdout.decode("utf-8")
    .strip()
)
if not qssim_version:
    # Not a git checkout, or no tags yet
    qssim_version = "0.1.0"
if "-" in qssim_version:
    # when not on tag, git describe outputs: "0.1.0-22-gdf81228"
    # pip wants a PEP 440 local version instead: "0.1.0+22.git.gdf81228"
    v, i, s = qssim_version.split("-")
    qssim_version = v + "+" + i + ".git." + s

assert "-" not in qssim_version
assert "." in qssim_version

assert os.path.isfile("qssim/version.py")
with open("qssim/VERSION", "w", encoding="utf-8") as fh:
    fh.write("%s\n" % qssim_version)

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setuptools.setup(
    name="qssim",
    version=qssim_version,
    description="Simulator for batch quantum secret sharing, a Trojan horse attack by a dishonest agent, and its defense",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests*"]),
    package_data={"qssim": ["VERSION"]},
    include_package_data=True,
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.8",
    entry_points={"console_scripts": ["qssim = qssim.main:main"]},
    install_requires=["numpy>=1.17", "scipy"],
    extras_require={"test": ["pytest"]},
)
