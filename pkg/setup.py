import os

try:
    from setuptools import setup
except ImportError:
    from distutils.core import setup


setup(
    name="mpcpart",
    version="0.1.0",
    packages=['mpcpart'],
    scripts=['bin/mpcpart'],
    license="LICENSE",
    package_data={
        'mpcpart': ['resources/*']
    },
    python_requires='>=3.7',
    description="MPCP blocking analysis and blocking-aware partitioning of fixed-priority tasks on multicores.",
    long_description="mpcpart bounds the blocking each task suffers under the multiprocessor priority ceiling "
                     "protocol, runs the matching response-time test, partitions task sets with a "
                     "blocking-aware worst-fit heuristic (BR-WFD) or plain worst-fit decreasing, and "
                     "drives seeded minimum-core and schedulable-ratio experiments.",
    install_requires=[line.strip() for line in
                      open(
                          os.path.join(
                              os.path.dirname(__file__), 'requirements.txt'), 'r').readlines()
                      if line.strip()],
    extras_require={
        'test': ['pytest>=7'],
    }
)
